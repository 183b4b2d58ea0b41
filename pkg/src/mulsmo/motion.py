"""Motion representation: per-frame feature layout, joint recovery, normalization.

A motion is an ``L x D`` float32 matrix at 20 fps. Each frame packs, in order:

* root yaw angular velocity (1, rad/s)
* root linear velocity in the root's horizontal frame (2: x, z, m/s)
* root height (1, m)
* joint-local positions for every non-root joint (3 per joint; x/z are
  root-relative and yaw-aligned, y is world height)
* joint rotations in the 6-D continuous representation (6 per non-root joint)
* joint velocities in the root frame (3 per joint, incl. root)
* binary foot-contact flags (4)

which gives ``D = 12 * J - 1`` for a skeleton with ``J`` joints (J=22 -> 263,
J=8 -> 95). The yaw/position channels are stored as rates; consumers integrate
with ``DT`` seconds per frame.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

FPS = 20
DT = 1.0 / FPS
CONTACT_FLAGS = 4
STD_FLOOR = 1e-6


def feature_dim(joints: int) -> int:
    return 4 + 3 * (joints - 1) + 6 * (joints - 1) + 3 * joints + CONTACT_FLAGS


def joints_for_dim(dim: int) -> int:
    joints, rem = divmod(dim + 1, 12)
    if rem != 0 or joints < 2:
        raise ValueError(f"feature dimension {dim} does not match any skeleton (need 12*J-1)")
    return joints


@dataclass(frozen=True)
class FeatureLayout:
    """Channel offsets for one skeleton size."""

    joints: int

    @property
    def dim(self) -> int:
        return feature_dim(self.joints)

    @property
    def root_rot_vel(self) -> slice:
        return slice(0, 1)

    @property
    def root_lin_vel(self) -> slice:
        return slice(1, 3)

    @property
    def root_height(self) -> slice:
        return slice(3, 4)

    @property
    def local_pos(self) -> slice:
        return slice(4, 4 + 3 * (self.joints - 1))

    @property
    def rotations(self) -> slice:
        start = 4 + 3 * (self.joints - 1)
        return slice(start, start + 6 * (self.joints - 1))

    @property
    def velocities(self) -> slice:
        start = 4 + 9 * (self.joints - 1)
        return slice(start, start + 3 * self.joints)

    @property
    def contacts(self) -> slice:
        return slice(self.dim - CONTACT_FLAGS, self.dim)

    def arm_channels(self, arm_joints: tuple[int, ...], axis: int = 1) -> list[int]:
        """Local-position channel indices of the given joints along one axis."""
        cols = []
        for j in arm_joints:
            if j == 0:
                raise ValueError("root has no local-position channels")
            cols.append(4 + 3 * (j - 1) + axis)
        return cols


@dataclass
class MotionSequence:
    """An ``L x D`` motion feature matrix."""

    frames: np.ndarray

    def __post_init__(self) -> None:
        self.frames = np.asarray(self.frames, dtype=np.float32)
        if self.frames.ndim != 2:
            raise ValueError(f"frames must be 2-D, got shape {self.frames.shape}")

    @property
    def length(self) -> int:
        return self.frames.shape[0]

    @property
    def dim(self) -> int:
        return self.frames.shape[1]

    @property
    def joints(self) -> int:
        return joints_for_dim(self.dim)

    @property
    def layout(self) -> FeatureLayout:
        return FeatureLayout(self.joints)


@dataclass
class JointTrajectory:
    """World-frame joint positions, ``L x J x 3`` in meters."""

    positions: np.ndarray

    def __post_init__(self) -> None:
        self.positions = np.asarray(self.positions, dtype=np.float64)
        if self.positions.ndim != 3 or self.positions.shape[2] != 3:
            raise ValueError(f"positions must be L x J x 3, got {self.positions.shape}")

    @property
    def length(self) -> int:
        return self.positions.shape[0]

    @property
    def joints(self) -> int:
        return self.positions.shape[1]


@dataclass
class ValidationReport:
    ok: bool
    issues: list[str] = field(default_factory=list)


def validate_motion(seq: MotionSequence, joints: int) -> ValidationReport:
    """Check dimensions, finiteness and contact-flag binarity; never raises."""
    issues = []
    expected = feature_dim(joints)
    if seq.dim != expected:
        issues.append(f"dimension mismatch: got D={seq.dim}, expected D={expected} for J={joints}")
    if seq.length < 1:
        issues.append("empty sequence (L=0)")
    if not np.isfinite(seq.frames).all():
        issues.append("non-finite values in frames")
    elif seq.dim == expected and seq.length >= 1:
        contacts = seq.frames[:, FeatureLayout(joints).contacts]
        if not np.isin(contacts, (0.0, 1.0)).all():
            issues.append("contact flags not binary")
    return ValidationReport(ok=not issues, issues=issues)


def _rotate_y(vec: np.ndarray, angle: np.ndarray) -> np.ndarray:
    """Rotate 3-vectors about +Y by `angle` (radians, broadcast over leading dims)."""
    c = np.cos(angle)
    s = np.sin(angle)
    x, y, z = vec[..., 0], vec[..., 1], vec[..., 2]
    return np.stack([c * x + s * z, y, -s * x + c * z], axis=-1)


def identity_rot6d(frames: int, joints: int) -> np.ndarray:
    """Identity rotation for every non-root joint, 6-D representation."""
    block = np.array([1.0, 0.0, 0.0, 0.0, 1.0, 0.0])
    return np.tile(block, (frames, joints - 1, 1))


def encode_joints(
    traj: JointTrajectory,
    contacts: np.ndarray,
    yaw: np.ndarray | None = None,
    rotations: np.ndarray | None = None,
) -> MotionSequence:
    """Encode a world-frame trajectory into the feature representation.

    The encoding is invariant to horizontal translation and to the initial yaw:
    the sequence is first re-expressed in the canonical frame where the root
    starts at the xz origin with zero yaw. ``recover_joints`` therefore returns
    the canonical trajectory; it equals the input exactly when the input is
    already canonical.

    `yaw` is the per-frame root facing angle (radians) used to localize
    velocities and joint offsets; defaults to zero. `rotations` is an optional
    ``L x (J-1) x 6`` rotation channel payload (carried through, defaults to
    identity). Contact flags are carried verbatim.
    """
    pos = traj.positions
    L, J = traj.length, traj.joints
    if L < 2:
        raise ValueError("encoding needs at least 2 frames")
    contacts = np.asarray(contacts, dtype=np.float64)
    if contacts.shape != (L, CONTACT_FLAGS):
        raise ValueError(f"contacts must be {L} x {CONTACT_FLAGS}, got {contacts.shape}")
    if yaw is None:
        yaw = np.zeros(L)
    else:
        yaw = np.asarray(yaw, dtype=np.float64)
        if yaw.shape != (L,):
            raise ValueError(f"yaw must have shape ({L},), got {yaw.shape}")
    if rotations is None:
        rotations = identity_rot6d(L, J)
    else:
        rotations = np.asarray(rotations, dtype=np.float64)
        if rotations.shape != (L, J - 1, 6):
            raise ValueError(f"rotations must be {L} x {J - 1} x 6, got {rotations.shape}")

    # Canonicalize: root frame 0 at xz origin, initial yaw zero.
    yaw = yaw - yaw[0]
    origin = pos[0, 0].copy()
    origin[1] = 0.0
    pos = _rotate_y(pos - origin, -yaw[0])

    root = pos[:, 0]
    rot_vel = np.empty(L)
    rot_vel[:-1] = np.diff(yaw) / DT
    rot_vel[-1] = rot_vel[-2]

    root_disp = np.diff(root, axis=0)
    lin_local = _rotate_y(root_disp, -yaw[:-1]) / DT
    lin_vel = np.empty((L, 2))
    lin_vel[:-1] = lin_local[:, [0, 2]]
    lin_vel[-1] = lin_vel[-2]

    root_flat = root.copy()
    root_flat[:, 1] = 0.0
    local = _rotate_y(pos[:, 1:] - root_flat[:, None, :], -yaw[:, None])

    joint_disp = np.diff(pos, axis=0)
    vel_local = _rotate_y(joint_disp, -yaw[:-1, None]) / DT
    vel = np.empty((L, J, 3))
    vel[:-1] = vel_local
    vel[-1] = vel[-2]

    frames = np.concatenate(
        [
            rot_vel[:, None],
            lin_vel,
            root[:, 1:2],
            local.reshape(L, -1),
            rotations.reshape(L, -1),
            vel.reshape(L, -1),
            contacts,
        ],
        axis=1,
    )
    return MotionSequence(frames.astype(np.float32))


def recover_joints(seq: MotionSequence) -> JointTrajectory:
    """Integrate the root channels and re-globalize joint-local positions."""
    lay = seq.layout
    L, J = seq.length, seq.joints
    f = seq.frames.astype(np.float64)

    rot_vel = f[:, lay.root_rot_vel][:, 0]
    yaw = np.zeros(L)
    yaw[1:] = np.cumsum(rot_vel[:-1]) * DT

    lin_vel = f[:, lay.root_lin_vel]
    step = _rotate_y(
        np.stack([lin_vel[:-1, 0], np.zeros(L - 1), lin_vel[:-1, 1]], axis=-1), yaw[:-1]
    ) * DT
    root = np.zeros((L, 3))
    root[1:, 0] = np.cumsum(step[:, 0])
    root[1:, 2] = np.cumsum(step[:, 2])
    root[:, 1] = f[:, lay.root_height][:, 0]

    local = f[:, lay.local_pos].reshape(L, J - 1, 3)
    world = _rotate_y(local, yaw[:, None])
    world[:, :, 0] += root[:, None, 0]
    world[:, :, 2] += root[:, None, 2]

    positions = np.concatenate([root[:, None, :], world], axis=1)
    return JointTrajectory(positions)


def motion_contacts(seq: MotionSequence) -> np.ndarray:
    return seq.frames[:, seq.layout.contacts]


def motion_rotations(seq: MotionSequence) -> np.ndarray:
    L = seq.length
    return seq.frames[:, seq.layout.rotations].reshape(L, seq.joints - 1, 6)


@dataclass
class FeatureStats:
    """Per-dimension mean/std used for feature normalization."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self) -> None:
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.std = np.asarray(self.std, dtype=np.float64)
        if self.mean.shape != self.std.shape or self.mean.ndim != 1:
            raise ValueError("mean/std must be 1-D arrays of equal length")

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def safe_std(self) -> np.ndarray:
        if (self.std < STD_FLOOR).any():
            warnings.warn(
                f"{int((self.std < STD_FLOOR).sum())} feature dimensions have near-zero std; "
                f"clamping to {STD_FLOOR}",
                stacklevel=3,
            )
        return np.maximum(self.std, STD_FLOOR)


def fit_stats(motions: list[MotionSequence]) -> FeatureStats:
    """Per-dimension mean/std pooled over all frames of all motions."""
    if not motions:
        raise ValueError("cannot fit stats on an empty motion list")
    stacked = np.concatenate([m.frames.astype(np.float64) for m in motions], axis=0)
    return FeatureStats(mean=stacked.mean(axis=0), std=stacked.std(axis=0))


def normalize(seq: MotionSequence, stats: FeatureStats) -> MotionSequence:
    if seq.dim != stats.dim:
        raise ValueError(f"stats dimension {stats.dim} != motion dimension {seq.dim}")
    out = (seq.frames.astype(np.float64) - stats.mean) / stats.safe_std()
    return MotionSequence(out.astype(np.float32))


def denormalize(seq: MotionSequence, stats: FeatureStats) -> MotionSequence:
    if seq.dim != stats.dim:
        raise ValueError(f"stats dimension {stats.dim} != motion dimension {seq.dim}")
    out = seq.frames.astype(np.float64) * stats.safe_std() + stats.mean
    return MotionSequence(out.astype(np.float32))


@dataclass(frozen=True)
class Skeleton:
    """Named joint set with a rest pose and the indices metrics care about."""

    name: str
    joint_names: tuple[str, ...]
    rest: np.ndarray
    foot_indices: tuple[int, ...]
    contact_joints: tuple[int, int, int, int]
    arm_indices: tuple[int, ...]
    head_index: int

    @property
    def joints(self) -> int:
        return len(self.joint_names)

    @property
    def dim(self) -> int:
        return feature_dim(self.joints)


def _mini_skeleton() -> Skeleton:
    names = ("root", "head", "l_hand", "r_hand", "l_knee", "r_knee", "l_foot", "r_foot")
    rest = np.array(
        [
            [0.00, 0.90, 0.00],
            [0.00, 1.60, 0.00],
            [-0.50, 1.00, 0.00],
            [0.50, 1.00, 0.00],
            [-0.12, 0.45, 0.00],
            [0.12, 0.45, 0.00],
            [-0.12, 0.03, 0.00],
            [0.12, 0.03, 0.00],
        ]
    )
    return Skeleton(
        name="mini",
        joint_names=names,
        rest=rest,
        foot_indices=(6, 7),
        contact_joints=(6, 6, 7, 7),
        arm_indices=(2, 3),
        head_index=1,
    )


def _humanml_skeleton() -> Skeleton:
    # 22-joint SMPL-style chain; rest pose is an approximate T-pose.
    names = (
        "pelvis", "l_hip", "r_hip", "spine1", "l_knee", "r_knee", "spine2",
        "l_ankle", "r_ankle", "spine3", "l_foot", "r_foot", "neck", "l_collar",
        "r_collar", "head", "l_shoulder", "r_shoulder", "l_elbow", "r_elbow",
        "l_wrist", "r_wrist",
    )
    rest = np.array(
        [
            [0.00, 0.90, 0.00], [-0.10, 0.85, 0.00], [0.10, 0.85, 0.00],
            [0.00, 1.05, 0.00], [-0.11, 0.48, 0.00], [0.11, 0.48, 0.00],
            [0.00, 1.20, 0.00], [-0.11, 0.08, 0.00], [0.11, 0.08, 0.00],
            [0.00, 1.30, 0.00], [-0.11, 0.02, 0.12], [0.11, 0.02, 0.12],
            [0.00, 1.50, 0.00], [-0.08, 1.45, 0.00], [0.08, 1.45, 0.00],
            [0.00, 1.62, 0.00], [-0.18, 1.42, 0.00], [0.18, 1.42, 0.00],
            [-0.45, 1.42, 0.00], [0.45, 1.42, 0.00], [-0.70, 1.42, 0.00],
            [0.70, 1.42, 0.00],
        ]
    )
    return Skeleton(
        name="humanml",
        joint_names=names,
        rest=rest,
        foot_indices=(7, 10, 8, 11),
        contact_joints=(7, 10, 8, 11),
        arm_indices=(18, 19, 20, 21),
        head_index=15,
    )


SKELETONS: dict[str, Skeleton] = {"mini": _mini_skeleton(), "humanml": _humanml_skeleton()}


def get_skeleton(name: str) -> Skeleton:
    try:
        return SKELETONS[name]
    except KeyError:
        raise KeyError(f"unknown skeleton {name!r}; available: {sorted(SKELETONS)}") from None


def import_feature_array(array: np.ndarray) -> MotionSequence:
    """Import an externally produced feature matrix (experimental).

    Accepts any ``L x (12*J-1)`` float array in the layout documented at module
    level, e.g. 263-dim arrays produced by HumanML3D-style pipelines with the
    same binary convention.
    """
    warnings.warn("import_feature_array is experimental; layout is assumed, not verified")
    array = np.asarray(array)
    if array.ndim != 2:
        raise ValueError("expected a 2-D feature array")
    joints_for_dim(array.shape[1])
    return MotionSequence(array.astype(np.float32))
