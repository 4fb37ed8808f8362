"""Explicit realizations of APs, human cylinders and walls around the typical UE."""

import math
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np

from ..core.params import DerivedConstants, Scenario

BLOCK_SIZE = 256
ORIENTATIONS = (0.0, math.pi / 2)


@dataclass(frozen=True, eq=False)
class ApField:
    positions: np.ndarray  # (n, 2), UE ground projection at the origin
    region_radius: float

    @property
    def distances(self) -> np.ndarray:
        return np.hypot(self.positions[:, 0], self.positions[:, 1])

    def __len__(self) -> int:
        return self.positions.shape[0]


@dataclass(frozen=True, eq=False)
class BlockageField:
    human_centers: np.ndarray  # (n_h, 2)
    human_radius: float
    human_height: float
    wall_centers: np.ndarray  # (n_w, 2)
    wall_lengths: np.ndarray
    wall_orientations: np.ndarray  # 0 (along x) or pi/2 (along y)
    region_radius: float

    @property
    def is_empty(self) -> bool:
        return self.human_centers.shape[0] == 0 and self.wall_centers.shape[0] == 0


def _uniform_disc(rng: np.random.Generator, count: int, radius: float) -> np.ndarray:
    r = radius * np.sqrt(rng.random(count))
    theta = rng.uniform(0.0, 2 * np.pi, count)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def _poisson_disc(rng: np.random.Generator, density: float, radius: float) -> np.ndarray:
    if density <= 0:
        return np.empty((0, 2))
    count = rng.poisson(density * np.pi * radius**2)
    return _uniform_disc(rng, count, radius)


def sample_ap_field(
    s: Scenario, rng: np.random.Generator, radius: Optional[float] = None
) -> ApField:
    if radius is None:
        radius = s.sim_radius if s.sim_radius is not None else 30.0
    if radius <= 0:
        raise ValueError(f"Simulation radius must be > 0, got {radius}")
    return ApField(positions=_poisson_disc(rng, s.lambda_A, radius), region_radius=radius)


def wall_margin(s: Scenario) -> float:
    """How far outside a region wall centers can sit and still reach into it."""
    if s.wall_length_mode == "exponential":
        return 3.0 * s.mean_L_W
    return s.mean_L_W / 2.0


def sample_blockage_field(
    s: Scenario,
    rng: np.random.Generator,
    radius: Optional[float] = None,
    margin: float = 0.0,
) -> BlockageField:
    """Humans and walls with centers in a disc of ``radius + margin``."""
    if radius is None:
        radius = s.sim_radius if s.sim_radius is not None else 30.0
    extent = radius + margin

    humans = _poisson_disc(rng, s.lambda_B, extent)
    walls = _poisson_disc(rng, s.lambda_W, extent)
    n_walls = walls.shape[0]
    if s.wall_length_mode == "exponential":
        lengths = rng.exponential(s.mean_L_W, n_walls)
    else:
        lengths = np.full(n_walls, s.mean_L_W)
    orientations = np.asarray(ORIENTATIONS)[rng.integers(0, 2, n_walls)]

    return BlockageField(
        human_centers=humans,
        human_radius=s.R_B,
        human_height=s.h_B,
        wall_centers=walls,
        wall_lengths=lengths,
        wall_orientations=orientations,
        region_radius=extent,
    )


def _humans_block(points, d, centers, radius, reach) -> np.ndarray:
    # Project each human center onto the UE->AP direction; blocked when the
    # projection falls inside the low part of the link and the offset is < R_B.
    # An AP straight overhead (d = 0) has no low part and is always LoS.
    unit = points / np.where(d > 0, d, 1.0)[:, None]
    along = unit @ centers.T
    across = np.abs(unit[:, 0:1] * centers[:, 1] - unit[:, 1:2] * centers[:, 0])
    inside = (
        (d > 0)[:, None]
        & (along >= 0)
        & (along <= (reach * d)[:, None])
        & (across <= radius)
    )
    return inside.any(axis=1)


def _walls_block(points, centers, lengths, orientations) -> np.ndarray:
    half = lengths / 2.0
    along_x = orientations == 0.0
    # Horizontal walls sit on y = cy; vertical walls on x = cx.
    normal_ap = np.where(along_x[None, :], points[:, 1:2], points[:, 0:1])
    tangent_ap = np.where(along_x[None, :], points[:, 0:1], points[:, 1:2])
    normal_wall = np.where(along_x, centers[:, 1], centers[:, 0])
    tangent_wall = np.where(along_x, centers[:, 0], centers[:, 1])

    with np.errstate(divide="ignore", invalid="ignore"):
        tau = normal_wall[None, :] / normal_ap
    crossing = tau * tangent_ap
    hit = (
        (normal_ap != 0)
        & (tau >= 0)
        & (tau <= 1)
        & (np.abs(crossing - tangent_wall[None, :]) <= half[None, :])
    )
    return hit.any(axis=1)


def is_los_many(points: np.ndarray, field: BlockageField, s: Scenario) -> np.ndarray:
    """LoS flags for links from the UE (origin) to each AP ground position."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n = points.shape[0]
    los = np.ones(n, dtype=bool)
    if n == 0 or field.is_empty:
        return los

    reach = (s.h_B - s.h_U) / (s.h_A - s.h_U)
    d = np.hypot(points[:, 0], points[:, 1])

    human_r = np.hypot(field.human_centers[:, 0], field.human_centers[:, 1])
    human_order = np.argsort(human_r)
    human_sorted = field.human_centers[human_order]
    human_r = human_r[human_order]

    wall_r = np.hypot(field.wall_centers[:, 0], field.wall_centers[:, 1])
    wall_order = np.argsort(wall_r)
    wall_sorted = field.wall_centers[wall_order]
    wall_r = wall_r[wall_order]
    lengths = field.wall_lengths[wall_order]
    orientations = field.wall_orientations[wall_order]
    max_half = float(lengths.max()) / 2.0 if lengths.size else 0.0

    # Far obstacles cannot touch near links: only a prefix of each sorted list
    # is tested against a block of APs sorted by distance.
    ap_order = np.argsort(d)
    for start in range(0, n, BLOCK_SIZE):
        idx = ap_order[start : start + BLOCK_SIZE]
        block, block_d = points[idx], d[idx]
        d_max = float(block_d.max())

        n_h = np.searchsorted(human_r, reach * d_max + field.human_radius, side="right")
        blocked = np.zeros(idx.size, dtype=bool)
        if n_h:
            blocked |= _humans_block(
                block, block_d, human_sorted[:n_h], field.human_radius, reach
            )
        n_w = np.searchsorted(wall_r, d_max + max_half, side="right")
        if n_w:
            blocked |= _walls_block(
                block, wall_sorted[:n_w], lengths[:n_w], orientations[:n_w]
            )
        los[idx] = ~blocked
    return los


def is_los(ap: np.ndarray, field: BlockageField, s: Scenario) -> bool:
    return bool(is_los_many(np.asarray(ap, dtype=float).reshape(1, 2), field, s)[0])


def sample_los_mask(
    field: ApField,
    s: Scenario,
    c: DerivedConstants,
    rng: np.random.Generator,
    blockage_mode: str,
) -> np.ndarray:
    """LoS flags for every AP of a realization under the chosen blockage mode."""
    if blockage_mode == "thinned":
        return rng.random(len(field)) < np.exp(-c.blockage_rate * field.distances)
    if blockage_mode == "geometric":
        blockage = sample_blockage_field(
            s, rng, radius=field.region_radius, margin=wall_margin(s) + s.R_B
        )
        return is_los_many(field.positions, blockage, s)
    raise ValueError(f"Unknown blockage mode: {blockage_mode}")


def scene_to_dict(ap_field: ApField, blockage: BlockageField) -> Dict[str, Any]:
    half = blockage.wall_lengths / 2.0
    along_x = blockage.wall_orientations == 0.0
    dx = np.where(along_x, half, 0.0)
    dy = np.where(along_x, 0.0, half)
    cx, cy = blockage.wall_centers[:, 0], blockage.wall_centers[:, 1]
    walls = [
        {"start": [float(x0), float(y0)], "end": [float(x1), float(y1)]}
        for x0, y0, x1, y1 in zip(cx - dx, cy - dy, cx + dx, cy + dy)
    ]
    return {
        "region_radius": ap_field.region_radius,
        "ue": [0.0, 0.0],
        "aps": ap_field.positions.tolist(),
        "humans": {
            "radius": blockage.human_radius,
            "height": blockage.human_height,
            "centers": blockage.human_centers.tolist(),
        },
        "walls": walls,
    }
