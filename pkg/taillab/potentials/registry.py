from typing import Dict, List, Mapping, Optional

from taillab.core.errors import ConfigError

from .base import PotentialSpec
from .families import CORRECTION, PURE, SUM, PotentialFamily

_FAMILIES: Dict[str, PotentialFamily] = {
    PURE.name: PURE,
    SUM.name: SUM,
    CORRECTION.name: CORRECTION,
}


def get_family(name: str) -> Optional[PotentialFamily]:
    return _FAMILIES.get(name)


def list_families() -> List[PotentialFamily]:
    return list(_FAMILIES.values())


def build_potential(params: Mapping[str, str]) -> PotentialSpec:
    name = str(params.get("family", PURE.name)).strip() or PURE.name
    family = get_family(name)
    if not family:
        names = ", ".join(f.name for f in list_families())
        raise ConfigError(f"未找到名为 {name} 的势族（可选：{names}）")
    return family.build(params)
