"""Dataset files: .mot binary motions, the JSON manifest, and a procedural
stylized-motion generator.

File formats (language-neutral, bit-exact):

* ``<name>.mot``       raw little-endian float32, row-major ``L x D``
* ``<name>.mot.json``  sidecar ``{"L":..., "D":..., "J":..., "fps":20}``
* ``manifest.json``    ``{"schema":1, ...}`` listing entries, taxonomies and
  per-dimension normalization stats
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .motion import (
    DT,
    FPS,
    FeatureStats,
    JointTrajectory,
    MotionSequence,
    Skeleton,
    encode_joints,
    fit_stats,
    get_skeleton,
)

MANIFEST_SCHEMA = 1


def write_motion(path: str | Path, seq: MotionSequence) -> Path:
    """Write frames as raw float32 plus a JSON sidecar; returns the .mot path."""
    path = Path(path)
    if path.suffix != ".mot":
        path = path.with_suffix(".mot")
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.ascontiguousarray(seq.frames, dtype="<f4")
    path.write_bytes(data.tobytes())
    sidecar = {"L": seq.length, "D": seq.dim, "J": seq.joints, "fps": FPS}
    Path(str(path) + ".json").write_text(json.dumps(sidecar, sort_keys=True) + "\n")
    return path


def read_motion(path: str | Path) -> MotionSequence:
    path = Path(path)
    sidecar = json.loads(Path(str(path) + ".json").read_text())
    frames = np.frombuffer(path.read_bytes(), dtype="<f4").reshape(sidecar["L"], sidecar["D"])
    return MotionSequence(frames.copy())


@dataclass
class ManifestEntry:
    path: str
    content_id: int
    content_text: str
    style_id: int


@dataclass
class DatasetManifest:
    """Index of a motion dataset plus its taxonomies and normalization stats."""

    skeleton: str
    contents: list[str]
    styles: list[dict]  # {"name": str, "group": str}
    entries: list[ManifestEntry]
    stats: FeatureStats
    root: Path = field(default=Path("."))

    def __post_init__(self) -> None:
        for e in self.entries:
            if not 0 <= e.content_id < len(self.contents):
                raise ValueError(f"content id {e.content_id} outside taxonomy")
            if not 0 <= e.style_id < len(self.styles):
                raise ValueError(f"style id {e.style_id} outside taxonomy")

    @property
    def style_names(self) -> list[str]:
        return [s["name"] for s in self.styles]

    def motion_path(self, entry: ManifestEntry) -> Path:
        return self.root / entry.path

    def load_motion(self, entry: ManifestEntry) -> MotionSequence:
        return read_motion(self.motion_path(entry))

    def filter_style_groups(self, excluded_groups: set[str]) -> "DatasetManifest":
        """Drop entries whose style belongs to an excluded group (taxonomies kept)."""
        keep = [
            e for e in self.entries if self.styles[e.style_id]["group"] not in excluded_groups
        ]
        return DatasetManifest(
            skeleton=self.skeleton,
            contents=self.contents,
            styles=self.styles,
            entries=keep,
            stats=self.stats,
            root=self.root,
        )


def save_manifest(manifest: DatasetManifest, path: str | Path) -> Path:
    path = Path(path)
    doc = {
        "schema": MANIFEST_SCHEMA,
        "skeleton": manifest.skeleton,
        "fps": FPS,
        "contents": manifest.contents,
        "styles": manifest.styles,
        "entries": [
            {
                "path": e.path,
                "content_id": e.content_id,
                "content_text": e.content_text,
                "style_id": e.style_id,
            }
            for e in manifest.entries
        ],
        "normalization": {
            "mean": manifest.stats.mean.tolist(),
            "std": manifest.stats.std.tolist(),
        },
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n")
    return path


def load_manifest(path: str | Path) -> DatasetManifest:
    path = Path(path)
    doc = json.loads(path.read_text())
    if doc.get("schema") != MANIFEST_SCHEMA:
        raise ValueError(f"unsupported manifest schema {doc.get('schema')!r}")
    stats = FeatureStats(
        mean=np.array(doc["normalization"]["mean"]),
        std=np.array(doc["normalization"]["std"]),
    )
    entries = [
        ManifestEntry(
            path=e["path"],
            content_id=e["content_id"],
            content_text=e["content_text"],
            style_id=e["style_id"],
        )
        for e in doc["entries"]
    ]
    return DatasetManifest(
        skeleton=doc["skeleton"],
        contents=doc["contents"],
        styles=doc["styles"],
        entries=entries,
        stats=stats,
        root=path.parent,
    )


# --- procedural generator -------------------------------------------------

CONTENT_LIBRARY = ["walk", "run", "jump", "turn"]

CONTENT_TEXTS = {
    "walk": [
        "a person walks forward",
        "someone walks straight ahead",
        "a figure strolls forward at a steady pace",
    ],
    "run": [
        "a person runs forward",
        "someone jogs quickly ahead",
        "a figure sprints forward",
    ],
    "jump": [
        "a person jumps up and down in place",
        "someone hops repeatedly on the spot",
        "a figure bounces up and down",
    ],
    "turn": [
        "a person walks along a curve, turning around",
        "someone walks in a circle",
        "a figure strolls while turning steadily",
    ],
}

# name -> taxonomy group; groups follow the character/personality/emotion/
# action/motivation/objective split used for evaluation-time filtering.
STYLE_LIBRARY = [
    {"name": "flapping", "group": "OBJ"},
    {"name": "lean", "group": "PER"},
    {"name": "heavyset", "group": "PER"},
    {"name": "elated", "group": "EMO"},
    {"name": "rushed", "group": "MOT"},
    {"name": "tiptoe", "group": "MOT"},
    {"name": "march", "group": "ACT"},
]


@dataclass
class SynthConfig:
    n_content: int = 4
    n_style: int = 6
    samples_per_pair: int = 25
    length: int = 48
    skeleton: str = "mini"
    seed: int = 0

    def validate(self) -> None:
        if self.n_content < 2 or self.n_content > len(CONTENT_LIBRARY):
            raise ValueError(f"n_content must be in [2, {len(CONTENT_LIBRARY)}]")
        if self.n_style < 2 or self.n_style > len(STYLE_LIBRARY):
            raise ValueError(f"n_style must be in [2, {len(STYLE_LIBRARY)}]")
        if self.samples_per_pair < 1:
            raise ValueError("samples_per_pair must be >= 1")
        if self.length < 8:
            raise ValueError("length must be >= 8")
        get_skeleton(self.skeleton)


@dataclass
class _GaitParams:
    speed: float = 1.2       # m/s along the path
    period: float = 0.9      # s per gait cycle
    turn_rate: float = 0.0   # rad/s yaw
    hop: bool = False        # in-place hop instead of striding
    hop_height: float = 0.0
    bob: float = 0.025       # root vertical bob amplitude
    foot_lift: float = 0.08
    arm_swing: float = 0.16  # fore/aft arm swing amplitude
    arm_left_scale: float = 1.0
    arm_right_scale: float = 1.0
    arm_up_bias: float = 0.0
    arm_forward_bias: float = 0.0
    arm_flap: float = 0.0    # vertical arm oscillation amplitude
    arm_flap_freq: float = 2.2
    lean_forward: float = 0.0
    height_shift: float = 0.0
    stance_widen: float = 0.0
    foot_rest_raise: float = 0.0
    knee_raise: float = 0.0


def _content_params(content: str) -> _GaitParams:
    if content == "walk":
        return _GaitParams()
    if content == "run":
        return _GaitParams(speed=2.3, period=0.6, bob=0.045, foot_lift=0.13, arm_swing=0.24)
    if content == "jump":
        return _GaitParams(speed=0.0, period=1.0, hop=True, hop_height=0.22, bob=0.0)
    if content == "turn":
        return _GaitParams(speed=1.1, period=0.9, turn_rate=0.9)
    raise ValueError(f"unknown content {content!r}")


def _apply_style(p: _GaitParams, style: str) -> _GaitParams:
    if style == "flapping":
        p.arm_flap = 0.30
    elif style == "lean":
        p.lean_forward = 0.22
        p.arm_forward_bias = 0.10
    elif style == "heavyset":
        p.speed *= 0.75
        p.period /= 0.75
        p.arm_swing *= 0.6
        p.height_shift = -0.07
        p.stance_widen = 0.07
        p.bob *= 0.6
    elif style == "elated":
        p.speed *= 1.1
        p.period /= 1.1
        p.arm_swing *= 1.6
        p.arm_up_bias = 0.20
        p.bob *= 1.9
        p.hop_height *= 1.25
    elif style == "rushed":
        p.speed *= 1.5
        p.period /= 1.5
        p.arm_swing *= 1.35
        p.lean_forward = 0.10
    elif style == "tiptoe":
        p.height_shift = 0.07
        p.foot_rest_raise = 0.045
        p.arm_swing *= 0.9
        p.bob *= 0.7
    elif style == "march":
        p.arm_swing *= 1.2
        p.knee_raise = 0.16
        p.foot_lift += 0.07
    else:
        raise ValueError(f"unknown style {style!r}")
    return p


def _smoothstep(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, 1.0)
    return x * x * (3.0 - 2.0 * x)


def _path_state(p: _GaitParams, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Root path position (xz in 3-vectors, y=0) and yaw at times t."""
    yaw = p.turn_rate * t
    if abs(p.turn_rate) > 1e-9:
        # integral of speed * (sin(w t), cos(w t)) for constant turn rate
        x = p.speed / p.turn_rate * (1.0 - np.cos(yaw))
        z = p.speed / p.turn_rate * np.sin(yaw)
    else:
        x = np.zeros_like(t)
        z = p.speed * t
    return np.stack([x, np.zeros_like(t), z], axis=-1), yaw


def _rotate_y_vec(vec: np.ndarray, angle: np.ndarray) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    x, y, z = vec[..., 0], vec[..., 1], vec[..., 2]
    return np.stack([c * x + s * z, y, -s * x + c * z], axis=-1)


def synth_motion(
    skeleton: Skeleton,
    content: str,
    style: str,
    length: int,
    rng: np.random.Generator,
) -> tuple[JointTrajectory, np.ndarray, np.ndarray, np.ndarray]:
    """One stylized sample: (trajectory, contacts, yaw, rotations).

    Content defines a parametric gait (speed, period, turn rate, hop); style
    reshapes it (amplitudes, offsets, tempo, limb asymmetry) so that style is
    separable from content by construction. Stance feet are pinned to world
    anchors, which keeps foot skate near zero for well-formed samples.
    """
    p = _apply_style(_content_params(content), style)
    phase = rng.uniform(0.0, 1.0)
    tempo_jitter = rng.uniform(0.95, 1.05)
    amp_jitter = rng.uniform(0.9, 1.1)
    p.period /= tempo_jitter
    p.speed *= tempo_jitter
    p.arm_swing *= amp_jitter

    t = np.arange(length) * DT
    rest = skeleton.rest
    base_h = rest[0, 1] + p.height_shift

    path, yaw = _path_state(p, t)
    cyc = t / p.period + phase

    root = path.copy()
    if p.hop:
        lift = np.maximum(0.0, np.sin(2.0 * math.pi * cyc)) ** 2
        root[:, 1] = base_h + p.hop_height * lift
    else:
        root[:, 1] = base_h + p.bob * np.abs(np.sin(2.0 * math.pi * cyc))

    J = skeleton.joints
    positions = np.zeros((length, J, 3))
    positions[:, 0] = root
    foot_y_rest = {j: rest[j, 1] + p.foot_rest_raise for j in skeleton.foot_indices}

    left_feet = [j for j in skeleton.foot_indices if rest[j, 0] < 0]
    right_feet = [j for j in skeleton.foot_indices if rest[j, 0] >= 0]

    foot_world: dict[int, np.ndarray] = {}
    for j in skeleton.foot_indices:
        side_phase = 0.0 if j in left_feet else 0.5
        lateral = rest[j].copy()
        lateral[0] += math.copysign(p.stance_widen, rest[j, 0])
        lateral[1] = 0.0
        if p.hop:
            fx = path + _rotate_y_vec(np.broadcast_to(lateral, (length, 3)), yaw)
            fy = foot_y_rest[j] + np.maximum(0.0, root[:, 1] - base_h)
            fw = fx.copy()
            fw[:, 1] = fy
        else:
            c = cyc + side_phase
            k = np.floor(c)
            frac = c - k
            duty = 0.6
            anchor_t = (k - phase - side_phase) * p.period
            next_t = anchor_t + p.period
            a0, ya0 = _path_state(p, anchor_t)
            a1, ya1 = _path_state(p, next_t)
            a0 = a0 + _rotate_y_vec(np.broadcast_to(lateral, (length, 3)), ya0)
            a1 = a1 + _rotate_y_vec(np.broadcast_to(lateral, (length, 3)), ya1)
            s = _smoothstep((frac - duty) / (1.0 - duty))
            fw = a0 + (a1 - a0) * s[:, None]
            swing = frac > duty
            lift = np.zeros(length)
            lift[swing] = p.foot_lift * np.sin(math.pi * np.clip(
                (frac[swing] - duty) / (1.0 - duty), 0.0, 1.0))
            fw[:, 1] = foot_y_rest[j] + lift
        foot_world[j] = fw
        positions[:, j] = fw

    # Knees (if present): midpoint of root-hip proxy and foot, biased forward.
    name_to_id = {n: i for i, n in enumerate(skeleton.joint_names)}
    knee_ids = [i for i, n in enumerate(skeleton.joint_names) if "knee" in n]
    for j in knee_ids:
        foot_name = skeleton.joint_names[j].replace("knee", "foot")
        foot = positions[:, name_to_id.get(foot_name, skeleton.foot_indices[0])]
        hip = root.copy()
        hip[:, 0] += rest[j, 0]
        hip[:, 1] = root[:, 1] * 0.55
        mid = 0.5 * (hip + foot)
        lift = np.maximum(0.0, foot[:, 1] - foot_y_rest[skeleton.foot_indices[0]])
        mid[:, 1] += 0.3 * lift + p.knee_raise * np.maximum(
            0.0, np.sin(2.0 * math.pi * (cyc + (0.0 if rest[j, 0] < 0 else 0.5))))
        positions[:, j] = mid

    # Arms and head: procedural local offsets rotated into the path frame.
    arm_angle = np.zeros((length, len(skeleton.arm_indices)))
    for idx, j in enumerate(skeleton.arm_indices):
        side = -1.0 if rest[j, 0] < 0 else 1.0
        scale = p.arm_left_scale if side < 0 else p.arm_right_scale
        swing = p.arm_swing * scale * np.sin(2.0 * math.pi * cyc + (0.0 if side < 0 else math.pi))
        flap = p.arm_flap * scale * np.sin(2.0 * math.pi * p.arm_flap_freq * t + 2.0 * math.pi * phase)
        local = np.zeros((length, 3))
        local[:, 0] = rest[j, 0]
        local[:, 1] = rest[j, 1] - rest[0, 1] + p.arm_up_bias + flap
        local[:, 2] = swing + p.arm_forward_bias + p.lean_forward * 0.8
        world = _rotate_y_vec(local, yaw)
        world[:, 0] += root[:, 0]
        world[:, 1] += root[:, 1]
        world[:, 2] += root[:, 2]
        positions[:, j] = world
        arm_angle[:, idx] = np.arctan2(swing + p.arm_forward_bias, 0.5)

    head = skeleton.head_index
    local = np.zeros((length, 3))
    local[:, 1] = rest[head, 1] - rest[0, 1]
    local[:, 2] = p.lean_forward
    world = _rotate_y_vec(local, yaw)
    positions[:, head] = world + root

    # Remaining joints (larger skeletons): rest offset following the root.
    placed = {0, head, *skeleton.foot_indices, *skeleton.arm_indices, *knee_ids}
    for j in range(J):
        if j in placed:
            continue
        local = rest[j] - rest[0]
        world = _rotate_y_vec(np.broadcast_to(local, (length, 3)).copy(), yaw)
        positions[:, j] = world + root
        positions[:, j, 1] = rest[j, 1] + p.height_shift + 0.3 * (root[:, 1] - base_h)

    contacts = np.zeros((length, 4))
    for k, j in enumerate(skeleton.contact_joints):
        contacts[:, k] = (positions[:, j, 1] < foot_y_rest.get(j, 0.05) + 0.02).astype(float)

    # Rotation channels from the arm swing axis-angle curves (rotation about x:
    # first two columns of R_x(a) are (1,0,0) and (0,cos a,sin a)); other
    # joints carry the identity.
    rotations = np.tile(np.array([1.0, 0, 0, 0, 1.0, 0]), (length, J - 1, 1))
    for idx, j in enumerate(skeleton.arm_indices):
        ang = arm_angle[:, idx]
        rotations[:, j - 1, 4] = np.cos(ang)
        rotations[:, j - 1, 5] = np.sin(ang)

    return JointTrajectory(positions), contacts, yaw, rotations


def synth_dataset(config: SynthConfig, out_dir: str | Path) -> DatasetManifest:
    """Generate the procedural dataset and write it under ``out_dir``.

    Deterministic for a fixed config+seed: per-sample RNG streams are derived
    with ``SeedSequence.spawn`` in a fixed order, and all files are bit-exact
    functions of their inputs.
    """
    config.validate()
    out_dir = Path(out_dir)
    skeleton = get_skeleton(config.skeleton)
    contents = CONTENT_LIBRARY[: config.n_content]
    styles = STYLE_LIBRARY[: config.n_style]

    seeds = np.random.SeedSequence(config.seed).spawn(
        config.n_content * config.n_style * config.samples_per_pair
    )
    entries: list[ManifestEntry] = []
    motions: list[MotionSequence] = []
    i = 0
    for ci, content in enumerate(contents):
        for si, style in enumerate(styles):
            for k in range(config.samples_per_pair):
                rng = np.random.Generator(np.random.PCG64(seeds[i]))
                i += 1
                traj, contacts, yaw, rotations = synth_motion(
                    skeleton, content, style["name"], config.length, rng
                )
                seq = encode_joints(traj, contacts, yaw=yaw, rotations=rotations)
                rel = f"motions/{content}_{style['name']}_{k:03d}.mot"
                write_motion(out_dir / rel, seq)
                text = CONTENT_TEXTS[content][int(rng.integers(len(CONTENT_TEXTS[content])))]
                entries.append(
                    ManifestEntry(path=rel, content_id=ci, content_text=text, style_id=si)
                )
                motions.append(seq)

    manifest = DatasetManifest(
        skeleton=config.skeleton,
        contents=contents,
        styles=styles,
        entries=entries,
        stats=fit_stats(motions),
        root=out_dir,
    )
    save_manifest(manifest, out_dir / "manifest.json")
    return manifest
