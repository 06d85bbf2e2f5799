from .config import ExperimentConfig, InitialDataConfig, NumericConfig, load_config, parse_config, resolve_stages
from .pipeline import PipelineOutcome, consume_pipeline_stream, run_pipeline_stream
from .selfcheck import SelfcheckReport, run_selfcheck
