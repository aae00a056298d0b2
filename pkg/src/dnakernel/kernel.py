"""Variational kernel values K(x, y) = |<psi(y)|psi(x)>|^2 and exact gradients.

Two evaluation routes are provided on purpose. ``kernel_eval`` builds both
feature states through the circuits module, one gate at a time; it is the
readable reference. The batched engine below vectorizes whole arrays of
pairs at once and differentiates with a reverse sweep (one generator
insertion per gate block, states shared between blocks), which is what makes
SGD over thousands of pairs per epoch affordable. The test suite pins the
two routes against each other and against finite differences.

Batched states are (batch, 2^n) complex arrays, amplitude index convention
as in the statevector module (qubit 0 = most significant bit).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from dnakernel.circuits import (
    ALPHABET,
    KernelParams,
    base_angles,
    feature_state,
    validate_sequence,
)
from dnakernel.statevector import inner_product, phase_matrix, ry_matrix

_CODE = {base: i for i, base in enumerate(ALPHABET)}

# per-base encoding matrices P(phase) @ Ry(tilt), indexed by _CODE
_ENC_MATS = np.stack(
    [phase_matrix(ph) @ ry_matrix(ry) for ry, ph in (base_angles(b) for b in ALPHABET)]
)

_ZDIAG_CACHE: dict[int, np.ndarray] = {}


def _zdiag(num_qubits: int) -> np.ndarray:
    """Diagonal of sum_q Z_q: entry i is n - 2*popcount(i)."""
    if num_qubits not in _ZDIAG_CACHE:
        idx = np.arange(1 << num_qubits, dtype=np.int64)
        pop = ((idx[:, None] >> np.arange(num_qubits, dtype=np.int64)) & 1).sum(axis=1)
        _ZDIAG_CACHE[num_qubits] = (num_qubits - 2 * pop).astype(np.float64)
    return _ZDIAG_CACHE[num_qubits]


def _ry2(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def encode_sequences(seqs) -> np.ndarray:
    """Map equal-length sequences to a (batch, n) array of base codes."""
    seqs = list(seqs)
    if not seqs:
        raise ValueError("empty sequence batch")
    n = len(seqs[0])
    for s in seqs:
        validate_sequence(s)
        if len(s) != n:
            raise ValueError(f"sequence length mismatch in batch: {len(s)} vs {n}")
    return np.array([[_CODE[ch] for ch in s] for s in seqs], dtype=np.uint8)


def _apply_batch_2x2(states, num_qubits, qubit, mats):
    """Apply per-row 2x2 matrices (batch, 2, 2) to one qubit of every row."""
    batch = states.shape[0]
    pre = 1 << qubit
    post = 1 << (num_qubits - qubit - 1)
    t = states.reshape(batch, pre, 2, post)
    return np.matmul(mats[:, None], t).reshape(batch, -1)


def _apply_rnx_batch(states, angle):
    c = np.cos(angle / 2)
    s = np.sin(angle / 2)
    return c * states - (1j * s) * states[:, ::-1]


def _forward(codes, params, keep_tape):
    """Run the re-uploading circuit on a batch of codes.

    Returns (states, tape, enc) where tape holds, per layer, the state
    entering the layer and the state after the Rz block; those two points
    are exactly what the reverse sweep needs.
    """
    batch, n = codes.shape
    dim = 1 << n
    enc = _ENC_MATS[codes]  # (batch, n, 2, 2)
    zdiag = _zdiag(n)
    s = np.zeros((batch, dim), dtype=np.complex128)
    s[:, 0] = 1.0
    tape = [] if keep_tape else None
    for t_rnx, t_rz, t_ry in params.angles:
        s_in = s
        s = _apply_rnx_batch(s, t_rnx)
        s = s * np.exp(-0.5j * t_rz * zdiag)
        if keep_tape:
            tape.append((s_in, s))
        # V(x) after Ry-all collapses to one product operator per qubit
        fused = np.matmul(enc, _ry2(t_ry))
        for q in range(n):
            s = _apply_batch_2x2(s, n, q, fused[:, q])
    return s, tape, enc


def feature_states(codes, params: KernelParams) -> np.ndarray:
    """Batched feature states, one row per sequence."""
    states, _, _ = _forward(np.asarray(codes), params, keep_tape=False)
    return states


def kernel_values(codes_x, codes_y, params: KernelParams) -> np.ndarray:
    """Batched kernel values for aligned rows of codes_x and codes_y."""
    sx = feature_states(codes_x, params)
    sy = feature_states(codes_y, params)
    c = np.einsum("bi,bi->b", np.conj(sy), sx)
    return np.abs(c) ** 2


def _y_sum_term(t, s, num_qubits):
    """-(i/2) sum_q <t|Y_q|s> for aligned batches t, s; returns (batch,)."""
    batch = t.shape[0]
    acc = np.zeros(batch, dtype=np.complex128)
    for q in range(num_qubits):
        pre = 1 << q
        post = 1 << (num_qubits - q - 1)
        tv = t.reshape(batch, pre, 2, post)
        sv = s.reshape(batch, pre, 2, post)
        acc += np.einsum("bpq,bpq->b", np.conj(tv[:, :, 1, :]), sv[:, :, 0, :])
        acc -= np.einsum("bpq,bpq->b", np.conj(tv[:, :, 0, :]), sv[:, :, 1, :])
    return 0.5 * acc


def _sweep(bra, tape, enc, params: KernelParams):
    """Reverse sweep: d<bra|psi>/d(theta_k) for all parameters of one side.

    Each trainable block contributes <t|G|s>, with s the forward state just
    after the block and t the bra pulled back through all later gates. The
    generators commute with their own gates, so the Ry and R_NX terms can be
    taken one step later in the sweep, at points the sweep visits anyway;
    only the layer-entry and post-Rz forward states have to be taped.
    """
    batch, n = enc.shape[0], enc.shape[1]
    zdiag = _zdiag(n)
    num_layers = params.num_layers
    dc = np.empty((batch, num_layers, 3), dtype=np.complex128)
    t = bra
    for layer in reversed(range(num_layers)):
        t_rnx, t_rz, t_ry = params.angles[layer]
        undo = np.matmul(_ry2(-t_ry), np.conj(np.swapaxes(enc, 2, 3)))
        for q in range(n):
            t = _apply_batch_2x2(t, n, q, undo[:, q])
        s_in, s_rz = tape[layer]
        dc[:, layer, 2] = _y_sum_term(t, s_rz, n)
        dc[:, layer, 1] = -0.5j * np.einsum("bi,i,bi->b", np.conj(t), zdiag, s_rz)
        t = t * np.exp(0.5j * t_rz * zdiag)
        t = _apply_rnx_batch(t, -t_rnx)
        dc[:, layer, 0] = -0.5j * np.einsum("bi,bi->b", np.conj(t), s_in[:, ::-1])
    return dc.reshape(batch, 3 * num_layers)


def kernel_values_and_gradients(codes_x, codes_y, params: KernelParams):
    """Batched kernel values and exact parameter gradients.

    Returns (values (batch,), gradients (batch, 3L)). Gradient columns follow
    the row-major flattening of KernelParams.angles. Both feature states
    depend on theta, so the derivative of c = <psi(y)|psi(x)> sums the x-side
    sweep and the conjugated y-side sweep; dK = 2 Re(conj(c) dc).
    """
    codes_x = np.asarray(codes_x)
    codes_y = np.asarray(codes_y)
    sx, tape_x, enc_x = _forward(codes_x, params, keep_tape=True)
    sy, tape_y, enc_y = _forward(codes_y, params, keep_tape=True)
    c = np.einsum("bi,bi->b", np.conj(sy), sx)
    dcx = _sweep(sy, tape_x, enc_x, params)
    dcy = _sweep(sx, tape_y, enc_y, params)
    dc = dcx + np.conj(dcy)
    values = np.abs(c) ** 2
    grads = 2.0 * np.real(np.conj(c)[:, None] * dc)
    return values, grads


def _check_pair(x: str, y: str):
    validate_sequence(x)
    validate_sequence(y)
    if len(x) != len(y):
        raise ValueError(f"sequence length mismatch: {len(x)} vs {len(y)}")


def kernel_eval(x: str, y: str, params: KernelParams) -> float:
    """Kernel value via the reference route: two feature states, one overlap."""
    _check_pair(x, y)
    fx = feature_state(x, params)
    fy = feature_state(y, params)
    return float(abs(inner_product(fy, fx)) ** 2)


def kernel_gradient(x: str, y: str, params: KernelParams) -> np.ndarray:
    """Exact dK/dtheta for one pair, ordered like KernelParams.angles.flat."""
    _check_pair(x, y)
    _, grads = kernel_values_and_gradients(
        encode_sequences([x]), encode_sequences([y]), params
    )
    return grads[0]


@dataclass(frozen=True)
class QuantumKernelModel:
    """Trainable quantum kernel over fixed-width sequences.

    Exposes the flat-parameter protocol shared with the classical baselines:
    init_params / kernel_batch / kernel_and_grad_batch, so the training loop
    does not care which family it is optimizing.
    """

    num_qubits: int
    num_layers: int

    @property
    def num_parameters(self) -> int:
        return 3 * self.num_layers

    def _params(self, flat) -> KernelParams:
        params = KernelParams.from_flat(flat)
        if params.num_layers != self.num_layers:
            raise ValueError(
                f"expected {self.num_parameters} parameters, got {np.size(flat)}"
            )
        return params

    def _check_codes(self, codes):
        codes = np.asarray(codes)
        if codes.ndim != 2 or codes.shape[1] != self.num_qubits:
            raise ValueError(
                f"expected codes of width {self.num_qubits}, got {codes.shape}"
            )
        return codes

    def init_params(self, rng: np.random.Generator) -> np.ndarray:
        return KernelParams.random(self.num_layers, rng).flat()

    def kernel_batch(self, flat_params, codes_a, codes_b) -> np.ndarray:
        return kernel_values(
            self._check_codes(codes_a), self._check_codes(codes_b), self._params(flat_params)
        )

    def kernel_and_grad_batch(self, flat_params, codes_a, codes_b):
        return kernel_values_and_gradients(
            self._check_codes(codes_a), self._check_codes(codes_b), self._params(flat_params)
        )

    def checkpoint_payload(self, flat_params, seed, epoch) -> dict:
        return {
            "model": "quantum",
            "num_qubits": self.num_qubits,
            "layers": self.num_layers,
            "theta": [float(v) for v in np.asarray(flat_params)],
            "seed": int(seed),
            "epoch": int(epoch),
        }
