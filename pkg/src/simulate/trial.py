"""One end-to-end realization of the downlink seen by the typical UE."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..antenna.cone import (
    ConeGains,
    ap_hit_probabilities,
    cone_gains,
    r_u0_max,
    ue_horizontal_hit_probability,
)
from ..antenna.pointing import PointingModel, sample_pointing_loss
from ..channel.large_scale import path_weight
from ..channel.mftr import MftrModel, build_mftr_model, mftr_sample
from ..core.params import DerivedConstants, Scenario
from ..geometry.scene import ApField, sample_ap_field, sample_los_mask


@dataclass(frozen=True)
class TrialResult:
    d0: Optional[float]
    sinr: Optional[float]
    h_pe: Optional[float]
    n_los_aps: int
    signal_mW: float
    interference_mW: float

    @property
    def has_serving_ap(self) -> bool:
        return self.d0 is not None


NO_AP_RESULT = TrialResult(
    d0=None, sinr=None, h_pe=None, n_los_aps=0, signal_mW=0.0, interference_mW=0.0
)


@dataclass(frozen=True, eq=False)
class TrialSetup:
    """Per-scenario quantities shared by every trial."""

    gains: ConeGains
    p_ap_hit: float
    p_ue_horizontal_hit: float
    pointing: PointingModel
    model: MftrModel

    @classmethod
    def build(
        cls, s: Scenario, c: DerivedConstants, model: MftrModel, pointing_mode: str
    ) -> "TrialSetup":
        p_h, p_v = ap_hit_probabilities(c)
        return cls(
            gains=cone_gains(c, s),
            p_ap_hit=p_h * p_v,
            p_ue_horizontal_hit=ue_horizontal_hit_probability(c),
            pointing=PointingModel.from_scenario(s, mode=pointing_mode),
            model=model,
        )


def _fading(setup: TrialSetup, rng, size, fixed: Optional[float]):
    if fixed is not None:
        return fixed if size is None else np.full(size, fixed)
    return mftr_sample(setup.model, rng, size=size)


def run_trial(
    s: Scenario,
    c: DerivedConstants,
    rng: np.random.Generator,
    blockage_mode: str,
    pointing_mode: str,
    setup: Optional[TrialSetup] = None,
    ap_field: Optional[ApField] = None,
    fixed_fading: Optional[float] = None,
) -> TrialResult:
    if setup is None:
        setup = TrialSetup.build(s, c, build_mftr_model(s.mftr), pointing_mode)
    elif setup.pointing.mode != pointing_mode:
        raise ValueError(
            f"Trial setup uses pointing mode {setup.pointing.mode!r}, not {pointing_mode!r}"
        )
    field = ap_field if ap_field is not None else sample_ap_field(s, rng, c.sim_radius)
    los = sample_los_mask(field, s, c, rng, blockage_mode)
    d_los = np.sort(field.distances[los])
    if d_los.size == 0:
        return NO_AP_RESULT

    # Nearest LoS AP serves; the remaining LoS APs interfere.
    d0, others = float(d_los[0]), d_los[1:]
    h_pe = float(sample_pointing_loss(setup.pointing, rng))
    signal = (
        c.P_t_lin * c.xi * c.G_max * h_pe * path_weight(d0, c, s)
        * _fading(setup, rng, None, fixed_fading)
    )

    k = others.size
    ap_main = rng.random(k) < setup.p_ap_hit
    ue_main = (rng.random(k) < setup.p_ue_horizontal_hit) & (others <= r_u0_max(d0, c))
    g = setup.gains
    gains = np.where(ap_main, g.A_main, g.A_side) * np.where(ue_main, g.U_main, g.U_side)
    fading = _fading(setup, rng, k, fixed_fading)
    interference = float(np.sum(c.P_t_lin * c.xi * gains * path_weight(others, c, s) * fading))

    return TrialResult(
        d0=d0,
        sinr=float(signal / (interference + c.N0_lin)),
        h_pe=h_pe,
        n_los_aps=int(d_los.size),
        signal_mW=float(signal),
        interference_mW=interference,
    )
