"""Dense f64 tensors with reverse-mode differentiation.

A :class:`Tape` records primitive applications in creation order (already a
topological order), and :func:`backward` walks it once in reverse. Ops work
on :class:`Tensor` values; passing ``tape=None`` (or tensors without a tape)
gives plain forward evaluation, which evaluation code uses for speed.

Besides the elementwise/matrix primitives there are fused sequence ops for
the GRU and LSTM cells (:func:`gru_sequence`, :func:`gru_over_vectors`,
:func:`lstm_sequence`) whose backward passes are hand-written BPTT. They are
exact: the test suite checks every op against central finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class ShapeMismatch(ValueError):
    pass


class Tape:
    """Ordered record of primitive applications."""

    __slots__ = ("nodes",)

    def __init__(self):
        self.nodes: list[Tensor] = []


class Tensor:
    __slots__ = ("data", "grad", "tape", "_parents", "_vjp")

    def __init__(self, data, tape: Tape | None = None, parents=(), vjp=None):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: np.ndarray | None = None
        self.tape = tape
        self._parents = parents
        self._vjp = vjp
        if tape is not None and vjp is not None:
            tape.nodes.append(self)

    @property
    def shape(self):
        return self.data.shape

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, tape={'yes' if self.tape else 'no'})"


def tensor(data, tape: Tape | None = None) -> Tensor:
    """A leaf tensor; with a tape it accumulates gradients in backward()."""
    return Tensor(data, tape=tape)


def _tape_of(*tensors) -> Tape | None:
    for t in tensors:
        if isinstance(t, Tensor) and t.tape is not None:
            return t.tape
    return None


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _accum(t: Tensor, g: np.ndarray):
    if t.grad is None:
        t.grad = np.array(g, dtype=np.float64, copy=True)
    else:
        t.grad += g


def _check_same_shape(a: Tensor, b: Tensor, op: str):
    if a.data.shape != b.data.shape:
        raise ShapeMismatch(f"{op}: {a.data.shape} vs {b.data.shape}")


# ---------- primitives ----------

def add(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _check_same_shape(a, b, "add")
    def vjp(g):
        _accum(a, g)
        _accum(b, g)
    return Tensor(a.data + b.data, _tape_of(a, b), (a, b), vjp)


def subtract(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _check_same_shape(a, b, "subtract")
    def vjp(g):
        _accum(a, g)
        _accum(b, -g)
    return Tensor(a.data - b.data, _tape_of(a, b), (a, b), vjp)


def elemwise_mul(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _check_same_shape(a, b, "elemwise_mul")
    def vjp(g):
        _accum(a, g * b.data)
        _accum(b, g * a.data)
    return Tensor(a.data * b.data, _tape_of(a, b), (a, b), vjp)


def square(a) -> Tensor:
    a = _as_tensor(a)
    def vjp(g):
        _accum(a, 2.0 * g * a.data)
    return Tensor(a.data * a.data, _tape_of(a), (a,), vjp)


def scale(a, c: float) -> Tensor:
    a = _as_tensor(a)
    def vjp(g):
        _accum(a, g * c)
    return Tensor(a.data * c, _tape_of(a), (a,), vjp)


def matmul(a, b) -> Tensor:
    """Matrix @ vector or matrix @ matrix."""
    a, b = _as_tensor(a), _as_tensor(b)
    if a.data.ndim != 2 or a.data.shape[1] != b.data.shape[0]:
        raise ShapeMismatch(f"matmul: {a.data.shape} @ {b.data.shape}")
    out = a.data @ b.data
    def vjp(g):
        if b.data.ndim == 1:
            _accum(a, np.outer(g, b.data))
            _accum(b, a.data.T @ g)
        else:
            _accum(a, g @ b.data.T)
            _accum(b, a.data.T @ g)
    return Tensor(out, _tape_of(a, b), (a, b), vjp)


def dot(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _check_same_shape(a, b, "dot")
    def vjp(g):
        _accum(a, g * b.data)
        _accum(b, g * a.data)
    return Tensor(float(a.data @ b.data), _tape_of(a, b), (a, b), vjp)


def concat(parts) -> Tensor:
    parts = [_as_tensor(p) for p in parts]
    sizes = [p.data.shape[0] for p in parts]
    def vjp(g):
        offset = 0
        for p, n in zip(parts, sizes):
            _accum(p, g[offset:offset + n])
            offset += n
    return Tensor(np.concatenate([p.data for p in parts]), _tape_of(*parts), tuple(parts), vjp)


def stack_scalars(items) -> Tensor:
    """Scalar tensors -> 1-D vector."""
    items = [_as_tensor(x) for x in items]
    def vjp(g):
        for i, x in enumerate(items):
            _accum(x, g[i])
    return Tensor(np.array([float(x.data) for x in items]), _tape_of(*items), tuple(items), vjp)


def sigmoid(a) -> Tensor:
    a = _as_tensor(a)
    out = _sigmoid(a.data)
    def vjp(g):
        _accum(a, g * out * (1.0 - out))
    return Tensor(out, _tape_of(a), (a,), vjp)


def tanh(a) -> Tensor:
    a = _as_tensor(a)
    out = np.tanh(a.data)
    def vjp(g):
        _accum(a, g * (1.0 - out * out))
    return Tensor(out, _tape_of(a), (a,), vjp)


def softmax(a) -> Tensor:
    """Softmax over a 1-D vector."""
    a = _as_tensor(a)
    if a.data.ndim != 1:
        raise ShapeMismatch(f"softmax expects a vector, got {a.data.shape}")
    shifted = a.data - a.data.max()
    e = np.exp(shifted)
    out = e / e.sum()
    def vjp(g):
        _accum(a, out * (g - float(g @ out)))
    return Tensor(out, _tape_of(a), (a,), vjp)


def one_hot(index: int, depth: int) -> np.ndarray:
    """Constant one-hot row; inputs are not differentiated."""
    if not 0 <= index < depth:
        raise ShapeMismatch(f"one_hot index {index} out of range for depth {depth}")
    v = np.zeros(depth)
    v[index] = 1.0
    return v


def sum_weighted(vectors, weights) -> Tensor:
    """Weighted sum of equally-shaped vectors: sum_i w[i] * v_i."""
    vectors = [_as_tensor(v) for v in vectors]
    weights = _as_tensor(weights)
    if weights.data.shape != (len(vectors),):
        raise ShapeMismatch(f"sum_weighted: {len(vectors)} vectors, weights {weights.data.shape}")
    out = np.zeros_like(vectors[0].data)
    for w, v in zip(weights.data, vectors):
        out += w * v.data
    def vjp(g):
        wg = np.empty(len(vectors))
        for i, v in enumerate(vectors):
            _accum(v, weights.data[i] * g)
            wg[i] = float(g @ v.data)
        _accum(weights, wg)
    return Tensor(out, _tape_of(weights, *vectors), (weights, *vectors), vjp)


def bce_loss(p, y: int) -> Tensor:
    """Binary cross-entropy against a 0/1 target, input clamped away from 0/1."""
    p = _as_tensor(p)
    eps = 1e-7
    pc = min(max(float(p.data), eps), 1.0 - eps)
    out = -(y * math.log(pc) + (1 - y) * math.log(1.0 - pc))
    def vjp(g):
        _accum(p, g * (pc - y) / (pc * (1.0 - pc)))
    return Tensor(out, _tape_of(p), (p,), vjp)


def mean(items) -> Tensor:
    items = [_as_tensor(x) for x in items]
    inv = 1.0 / len(items)
    def vjp(g):
        for x in items:
            _accum(x, g * inv)
    return Tensor(sum(float(x.data) for x in items) * inv, _tape_of(*items), tuple(items), vjp)


def backward(loss: Tensor):
    """Reverse-mode gradients of a scalar loss for every tensor on its tape."""
    if loss.data.ndim != 0 and loss.data.shape != ():
        raise ShapeMismatch(f"backward expects a scalar, got {loss.data.shape}")
    if loss.tape is None:
        raise ValueError("loss is not recorded on a tape")
    loss.grad = np.asarray(1.0)
    for node in reversed(loss.tape.nodes):
        if node.grad is not None and node._vjp is not None:
            node._vjp(node.grad)


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


# ---------- recurrent cells ----------

@dataclass
class GruParams:
    """Gate convention: z = s(Wz x + Uz h + bz), r = s(Wr x + Ur h + br),
    hc = tanh(Wh x + Uh (r*h) + bh), h' = (1-z)*h + z*hc."""

    wz: Tensor
    uz: Tensor
    bz: Tensor
    wr: Tensor
    ur: Tensor
    br: Tensor
    wh: Tensor
    uh: Tensor
    bh: Tensor

    def blocks(self):
        return [("wz", self.wz), ("uz", self.uz), ("bz", self.bz),
                ("wr", self.wr), ("ur", self.ur), ("br", self.br),
                ("wh", self.wh), ("uh", self.uh), ("bh", self.bh)]


def init_gru(rng: np.random.Generator, input_size: int, state_size: int,
             tape: Tape | None = None) -> GruParams:
    def mat(rows, cols, fan_in):
        k = 1.0 / math.sqrt(fan_in)
        return tensor(rng.uniform(-k, k, size=(rows, cols)), tape)
    def vec(n, fan_in):
        k = 1.0 / math.sqrt(fan_in)
        return tensor(rng.uniform(-k, k, size=n), tape)
    return GruParams(
        wz=mat(state_size, input_size, input_size), uz=mat(state_size, state_size, state_size),
        bz=vec(state_size, state_size),
        wr=mat(state_size, input_size, input_size), ur=mat(state_size, state_size, state_size),
        br=vec(state_size, state_size),
        wh=mat(state_size, input_size, input_size), uh=mat(state_size, state_size, state_size),
        bh=vec(state_size, state_size),
    )


def gru_cell(x: Tensor, h: Tensor, p: GruParams) -> Tensor:
    """One GRU step built from primitives (the fused ops match it exactly)."""
    z = sigmoid(add(add(matmul(p.wz, x), matmul(p.uz, h)), p.bz))
    r = sigmoid(add(add(matmul(p.wr, x), matmul(p.ur, h)), p.br))
    hc = tanh(add(add(matmul(p.wh, x), matmul(p.uh, elemwise_mul(r, h))), p.bh))
    ones = Tensor(np.ones_like(z.data))
    return add(elemwise_mul(subtract(ones, z), h), elemwise_mul(z, hc))


def _gru_step_raw(p: GruParams, wx_z, wx_r, wx_h, h):
    """Forward math shared by the fused ops; wx_* are the W*x contributions."""
    z = _sigmoid(wx_z + p.uz.data @ h + p.bz.data)
    r = _sigmoid(wx_r + p.ur.data @ h + p.br.data)
    rh = r * h
    hc = np.tanh(wx_h + p.uh.data @ rh + p.bh.data)
    return z, r, rh, hc, (1.0 - z) * h + z * hc


class _GruBack:
    """Shared BPTT state for the fused GRU ops."""

    def __init__(self, p: GruParams):
        self.p = p
        self.steps = []  # (h_prev, z, r, rh, hc, x_info)

    def push(self, h_prev, z, r, rh, hc, x_info):
        self.steps.append((h_prev, z, r, rh, hc, x_info))

    def run(self, g, on_dx):
        """Propagate dL/dh_final back through all steps.

        ``on_dx(x_info, da_z, da_r, da_h)`` handles the input-side gradient
        of each step; returns dL/dh0.
        """
        p = self.p
        grads = {name: np.zeros_like(t.data) for name, t in p.blocks()}
        dh = np.array(g, copy=True)
        for h_prev, z, r, rh, hc, x_info in reversed(self.steps):
            dz = dh * (hc - h_prev)
            dhc = dh * z
            dh_direct = dh * (1.0 - z)
            da_h = dhc * (1.0 - hc * hc)
            drh = p.uh.data.T @ da_h
            dr = drh * h_prev
            da_r = dr * r * (1.0 - r)
            da_z = dz * z * (1.0 - z)
            grads["uz"] += np.outer(da_z, h_prev)
            grads["ur"] += np.outer(da_r, h_prev)
            grads["uh"] += np.outer(da_h, rh)
            grads["bz"] += da_z
            grads["br"] += da_r
            grads["bh"] += da_h
            on_dx(grads, x_info, da_z, da_r, da_h)
            dh = (dh_direct + drh * r
                  + p.uz.data.T @ da_z + p.ur.data.T @ da_r)
        for name, t in p.blocks():
            _accum(t, grads[name])
        return dh


def gru_sequence(indices, p: GruParams, tape: Tape | None,
                 h0: np.ndarray | None = None, reverse: bool = False) -> Tensor:
    """Run a GRU over one-hot inputs given by integer indices (fused op).

    One-hot inputs make W @ x a column lookup. Returns the final hidden
    state; ``reverse=True`` processes the indices last-to-first.
    """
    idxs = list(indices)
    if reverse:
        idxs = idxs[::-1]
    if not idxs:
        raise ShapeMismatch("gru_sequence needs at least one input")
    state = np.zeros(p.uz.data.shape[0]) if h0 is None else np.asarray(h0, dtype=np.float64)
    back = _GruBack(p)
    for i in idxs:
        z, r, rh, hc, new = _gru_step_raw(p, p.wz.data[:, i], p.wr.data[:, i],
                                          p.wh.data[:, i], state)
        back.push(state, z, r, rh, hc, i)
        state = new

    def on_dx(grads, i, da_z, da_r, da_h):
        grads["wz"][:, i] += da_z
        grads["wr"][:, i] += da_r
        grads["wh"][:, i] += da_h

    def vjp(g):
        back.run(g, on_dx)

    parents = tuple(t for _, t in p.blocks())
    return Tensor(state, tape, parents, vjp)


def gru_over_vectors(xs, h0, p: GruParams) -> Tensor:
    """Run a GRU over a sequence of vector tensors from state h0 (fused op).

    Gradients flow into every input vector, the initial state and all nine
    parameter blocks.
    """
    xs = [_as_tensor(x) for x in xs]
    if not xs:
        raise ShapeMismatch("gru_over_vectors needs at least one input")
    h0 = _as_tensor(h0)
    state = np.array(h0.data, copy=True)
    back = _GruBack(p)
    for x in xs:
        z, r, rh, hc, new = _gru_step_raw(p, p.wz.data @ x.data, p.wr.data @ x.data,
                                          p.wh.data @ x.data, state)
        back.push(state, z, r, rh, hc, x)
        state = new

    def on_dx(grads, x, da_z, da_r, da_h):
        grads["wz"] += np.outer(da_z, x.data)
        grads["wr"] += np.outer(da_r, x.data)
        grads["wh"] += np.outer(da_h, x.data)
        _accum(x, self_p.wz.data.T @ da_z + self_p.wr.data.T @ da_r + self_p.wh.data.T @ da_h)

    self_p = p

    def vjp(g):
        dh0 = back.run(g, on_dx)
        _accum(h0, dh0)

    parents = (h0, *xs, *(t for _, t in p.blocks()))
    return Tensor(state, _tape_of(h0, *xs, *(t for _, t in p.blocks())), parents, vjp)


@dataclass
class LstmParams:
    wi: Tensor; ui: Tensor; bi: Tensor
    wf: Tensor; uf: Tensor; bf: Tensor
    wo: Tensor; uo: Tensor; bo: Tensor
    wg: Tensor; ug: Tensor; bg: Tensor

    def blocks(self):
        return [(n, getattr(self, n)) for n in
                ("wi", "ui", "bi", "wf", "uf", "bf", "wo", "uo", "bo", "wg", "ug", "bg")]


def init_lstm(rng: np.random.Generator, input_size: int, state_size: int,
              tape: Tape | None = None) -> LstmParams:
    def mat(cols):
        k = 1.0 / math.sqrt(cols)
        return tensor(rng.uniform(-k, k, size=(state_size, cols)), tape)
    def vec():
        k = 1.0 / math.sqrt(state_size)
        return tensor(rng.uniform(-k, k, size=state_size), tape)
    kw = {}
    for gate in "ifog":
        kw[f"w{gate}"] = mat(input_size)
        kw[f"u{gate}"] = mat(state_size)
        kw[f"b{gate}"] = vec()
    return LstmParams(**kw)


def lstm_sequence(indices, p: LstmParams, tape: Tape | None) -> Tensor:
    """Run an LSTM over one-hot inputs given by indices; returns final h."""
    idxs = list(indices)
    if not idxs:
        raise ShapeMismatch("lstm_sequence needs at least one input")
    d = p.ui.data.shape[0]
    h = np.zeros(d)
    c = np.zeros(d)
    steps = []
    for k in idxs:
        i = _sigmoid(p.wi.data[:, k] + p.ui.data @ h + p.bi.data)
        f = _sigmoid(p.wf.data[:, k] + p.uf.data @ h + p.bf.data)
        o = _sigmoid(p.wo.data[:, k] + p.uo.data @ h + p.bo.data)
        g = np.tanh(p.wg.data[:, k] + p.ug.data @ h + p.bg.data)
        c_new = f * c + i * g
        tc = np.tanh(c_new)
        steps.append((k, h, c, i, f, o, g, tc))
        h, c = o * tc, c_new

    def vjp(gout):
        grads = {name: np.zeros_like(t.data) for name, t in p.blocks()}
        dh = np.array(gout, copy=True)
        dc = np.zeros(d)
        for k, h_prev, c_prev, i, f, o, g, tc in reversed(steps):
            do = dh * tc
            dc = dc + dh * o * (1.0 - tc * tc)
            di = dc * g
            df = dc * c_prev
            dg = dc * i
            da = {"i": di * i * (1.0 - i), "f": df * f * (1.0 - f),
                  "o": do * o * (1.0 - o), "g": dg * (1.0 - g * g)}
            dh = np.zeros(d)
            for gate in "ifog":
                grads[f"w{gate}"][:, k] += da[gate]
                grads[f"u{gate}"] += np.outer(da[gate], h_prev)
                grads[f"b{gate}"] += da[gate]
                dh += getattr(p, f"u{gate}").data.T @ da[gate]
            dc = dc * f
        for name, t in p.blocks():
            _accum(t, grads[name])

    parents = tuple(t for _, t in p.blocks())
    return Tensor(h, tape, parents, vjp)


# ---------- Adam ----------

@dataclass
class AdamState:
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0


@dataclass(frozen=True)
class AdamHyper:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def adam_step(params: dict[str, np.ndarray], grads: dict[str, np.ndarray],
              state: AdamState, hyper: AdamHyper = AdamHyper()):
    """In-place Adam update with bias correction; no weight decay."""
    state.t += 1
    b1, b2 = hyper.beta1, hyper.beta2
    correct1 = 1.0 - b1 ** state.t
    correct2 = 1.0 - b2 ** state.t
    for name, p in params.items():
        g = grads.get(name)
        if g is None:
            continue
        m = state.m.setdefault(name, np.zeros_like(p))
        v = state.v.setdefault(name, np.zeros_like(p))
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        p -= hyper.lr * (m / correct1) / (np.sqrt(v / correct2) + hyper.eps)


# ---------- checkpoint files ----------
#
# Versioned flat text: a header line, then per tensor one line
# "name <dims>" followed by one line of space-separated float hex values
# (bit-exact round-trip). Metadata lines "meta key value" may precede the
# tensors.

CHECKPOINT_MAGIC = "logiclearn-checkpoint v1"


def save_checkpoint(path, tensors: dict[str, np.ndarray], meta: dict[str, str] | None = None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CHECKPOINT_MAGIC + "\n")
        for k, v in (meta or {}).items():
            if any(ch.isspace() for ch in k) or "\n" in str(v):
                raise ValueError(f"bad meta entry {k!r}")
            fh.write(f"meta {k} {v}\n")
        for name in sorted(tensors):
            arr = np.asarray(tensors[name], dtype=np.float64)
            dims = ",".join(str(n) for n in arr.shape)
            fh.write(f"{name} {dims}\n")
            fh.write(" ".join(x.hex() for x in arr.reshape(-1).tolist()) + "\n")


def load_checkpoint(path) -> tuple[dict[str, np.ndarray], dict[str, str]]:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != CHECKPOINT_MAGIC:
        raise ValueError(f"not a checkpoint file: {path}")
    tensors: dict[str, np.ndarray] = {}
    meta: dict[str, str] = {}
    i = 1
    while i < len(lines):
        if lines[i].startswith("meta "):
            _, key, value = lines[i].split(" ", 2)
            meta[key] = value
            i += 1
            continue
        name, dims = lines[i].split(" ")
        shape = tuple(int(x) for x in dims.split(",") if x)
        values = [float.fromhex(tok) for tok in lines[i + 1].split()] if lines[i + 1] else []
        tensors[name] = np.array(values).reshape(shape)
        i += 2
    return tensors, meta
