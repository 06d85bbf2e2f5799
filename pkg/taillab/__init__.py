"""taillab: late-time tails of 1D waves scattering off inverse-power potentials."""

__version__ = "0.1.0"
