"""Non-Hermitian effective model for chain plus qubits, pure-state evolution
in the single- and two-excitation manifolds, Monte-Carlo wavefunction
trajectories with collective jump operators, and observables.

Two-excitation amplitudes are stored as a symmetric M x M matrix with zero
diagonal (hard-core constraint); the Hamiltonian action is matrix-free in the
pair basis, H C + C H^T with the diagonal projected out.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .geometry import (
    ChainGeometry,
    Emitter,
    ImpurityQubit,
    chain_emitters,
    interaction_matrices,
    qubit_emitter,
)

_CLIP = -1e-10  # Gamma eigenvalues above this are zeroed; below is an error


class ModelError(ValueError):
    pass


class StepInstabilityError(RuntimeError):
    """Norm increased beyond tolerance during no-jump evolution."""


@dataclass
class EffectiveModel:
    """Assembled non-Hermitian model: H_eff = J - i Gamma/2 with detunings on
    the diagonal, the dissipation matrix, and its jump-operator eigenbasis."""

    emitters: list[Emitter]
    h_eff: np.ndarray
    gamma: np.ndarray
    n_chain: int
    n_qubits: int
    _jump_basis: tuple[np.ndarray, np.ndarray] | None = field(
        default=None, repr=False
    )
    _eigen_cache: tuple[np.ndarray, np.ndarray, np.ndarray] | None = field(
        default=None, repr=False
    )

    @property
    def size(self) -> int:
        return len(self.emitters)

    @property
    def gamma0(self) -> np.ndarray:
        return np.array([e.gamma0 for e in self.emitters])

    @property
    def positions(self) -> np.ndarray:
        return np.array([e.position for e in self.emitters])

    @property
    def jump_basis(self) -> tuple[np.ndarray, np.ndarray]:
        """(rates, vectors): eigenvalues lambda_nu >= 0 of Gamma (clipped at
        zero above -1e-10) and the orthonormal eigenvector columns."""
        if self._jump_basis is None:
            rates, vecs = np.linalg.eigh(self.gamma)
            if np.min(rates) < _CLIP * max(1.0, np.max(np.abs(rates))):
                raise ModelError(
                    f"Gamma has a significantly negative eigenvalue {rates.min()}"
                )
            rates = np.clip(rates, 0.0, None)
            self._jump_basis = (rates, vecs)
        return self._jump_basis

    def eigen(self):
        """Cached eigendecomposition (w, V, V^-1) of H_eff."""
        if self._eigen_cache is None:
            w, v = scipy.linalg.eig(self.h_eff)
            vinv = np.linalg.inv(v)
            self._eigen_cache = (w, v, vinv)
        return self._eigen_cache


def build_model(
    chain: ChainGeometry | None, qubits: list[ImpurityQubit] = ()
) -> EffectiveModel:
    """Assemble H_eff(i,j) = J^ij - i Gamma^ij / 2 (off-diagonal) and
    H_eff(i,i) = detuning_i - i gamma0_i / 2 for chain atoms then qubits."""
    emitters: list[Emitter] = []
    n_chain = 0
    if chain is not None:
        emitters.extend(chain_emitters(chain))
        n_chain = chain.n_atoms
    emitters.extend(qubit_emitter(q) for q in qubits)
    if not emitters:
        raise ModelError("model needs at least one emitter")
    j_mat, g_mat = interaction_matrices(emitters)
    h_eff = np.asarray(j_mat, dtype=complex) - 0.5j * np.asarray(g_mat, dtype=complex)
    return EffectiveModel(
        emitters=emitters,
        h_eff=h_eff,
        gamma=np.asarray(g_mat),
        n_chain=n_chain,
        n_qubits=len(emitters) - n_chain,
    )


@dataclass
class PureState1:
    """Single-excitation amplitudes over emitters."""

    amplitudes: np.ndarray

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalized(self) -> "PureState1":
        return PureState1(self.amplitudes / np.sqrt(self.norm_sq))

    def site_populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass
class PureState2:
    """Two-excitation amplitudes on ordered pairs (i < j), stored as a
    symmetric matrix with zero diagonal (c_ij = c_ji, no double occupancy)."""

    pair_matrix: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.pair_matrix, dtype=complex)
        np.fill_diagonal(c, 0.0)
        self.pair_matrix = c

    @property
    def norm_sq(self) -> float:
        return float(0.5 * np.sum(np.abs(self.pair_matrix) ** 2))

    def normalized(self) -> "PureState2":
        return PureState2(self.pair_matrix / np.sqrt(self.norm_sq))

    def site_populations(self) -> np.ndarray:
        """P(emitter m excited) = sum_{j != m} |c_mj|^2."""
        return np.sum(np.abs(self.pair_matrix) ** 2, axis=1)

    def pair_amplitudes(self) -> np.ndarray:
        """Flat amplitudes over ordered pairs i < j (row-major upper triangle)."""
        m = self.pair_matrix.shape[0]
        iu = np.triu_indices(m, k=1)
        return self.pair_matrix[iu]


State = PureState1 | PureState2


def apply_hamiltonian_two_exc(state: PureState2, model: EffectiveModel) -> PureState2:
    """Matrix-free pair-basis Hamiltonian action:
    (H c)_ij = sum_{m != j} H_im c_mj + sum_{m != i} H_jm c_im,
    equal to H C + C H^T with the (unphysical) diagonal projected out."""
    c = state.pair_matrix
    h = model.h_eff
    out = h @ c + c @ h.T
    np.fill_diagonal(out, 0.0)
    return PureState2(out)


def _apply_h(state: State, model: EffectiveModel) -> State:
    if isinstance(state, PureState1):
        return PureState1(model.h_eff @ state.amplitudes)
    return apply_hamiltonian_two_exc(state, model)


def _spectral_radius_estimate(model: EffectiveModel, two_exc: bool, iters: int = 30):
    """Power-iteration bound on max |eigenvalue| of the manifold Hamiltonian."""
    m = model.size
    rng = np.random.default_rng(12345)
    if two_exc:
        c = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        c = c + c.T
        np.fill_diagonal(c, 0.0)
        st: State = PureState2(c)
    else:
        st = PureState1(rng.standard_normal(m) + 1j * rng.standard_normal(m))
    rad = 1.0
    for _ in range(iters):
        nrm = np.sqrt(st.norm_sq)
        if nrm == 0:
            break
        if isinstance(st, PureState1):
            st = PureState1(st.amplitudes / nrm)
        else:
            st = PureState2(st.pair_matrix / nrm)
        st = _apply_h(st, model)
        rad = np.sqrt(st.norm_sq)
    return max(rad, 1.0)


def rk4_timestep(model: EffectiveModel, two_exc: bool, safety: float = 0.01) -> float:
    return safety / _spectral_radius_estimate(model, two_exc)


def _rk4_step(state: State, model: EffectiveModel, dt: float) -> State:
    """One classical RK4 step of d psi/dt = -i H psi."""

    def deriv(s: State) -> State:
        hs = _apply_h(s, model)
        if isinstance(hs, PureState1):
            return PureState1(-1j * hs.amplitudes)
        return PureState2(-1j * hs.pair_matrix)

    def axpy(a: State, b: State, fac: float) -> State:
        if isinstance(a, PureState1):
            return PureState1(a.amplitudes + fac * b.amplitudes)
        return PureState2(a.pair_matrix + fac * b.pair_matrix)

    k1 = deriv(state)
    k2 = deriv(axpy(state, k1, dt / 2.0))
    k3 = deriv(axpy(state, k2, dt / 2.0))
    k4 = deriv(axpy(state, k3, dt))
    out = axpy(state, k1, dt / 6.0)
    out = axpy(out, k2, dt / 3.0)
    out = axpy(out, k3, dt / 3.0)
    return axpy(out, k4, dt / 6.0)


@dataclass
class TrajectoryRecord:
    """Time grid, named observable columns, jump log and RNG seed."""

    times: np.ndarray
    observables: dict[str, np.ndarray]
    jumps: list[tuple[float, int, int, int]] = field(default_factory=list)
    seed: int | None = None


def _record_point(state: State, obs: dict[str, list]):
    obs["norm_sq"].append(state.norm_sq)
    obs["site_population"].append(state.site_populations())


def _finalize(times, obs, jumps=None, seed=None) -> TrajectoryRecord:
    return TrajectoryRecord(
        times=np.asarray(times, dtype=float),
        observables={k: np.array(v) for k, v in obs.items()},
        jumps=jumps or [],
        seed=seed,
    )


def propagate_no_jump(
    state: State,
    model: EffectiveModel,
    t_grid: np.ndarray,
    method: str = "eigen",
) -> TrajectoryRecord:
    """No-jump evolution d psi/dt = -i H_eff psi recorded on t_grid.

    eigen: exact via a one-time dense eigendecomposition (single excitation,
    M <= 2500). rk4: fixed-step 4th order with dt <= 0.01 / max|eigenvalue|;
    the squared norm must never increase between steps (instability aborts).
    """
    t_grid = np.asarray(t_grid, dtype=float)
    obs: dict[str, list] = {"norm_sq": [], "site_population": []}
    if method == "eigen":
        if not isinstance(state, PureState1):
            raise ModelError("eigen propagation supports single excitation only")
        if model.size > 2500:
            raise ModelError("eigen propagation budget is M <= 2500")
        w, v, vinv = model.eigen()
        coef = vinv @ state.amplitudes
        for t in t_grid:
            amp = v @ (np.exp(-1j * w * (t - t_grid[0])) * coef)
            _record_point(PureState1(amp), obs)
        return _finalize(t_grid, obs)
    if method != "rk4":
        raise ValueError(f"unknown method {method!r}")

    dt = rk4_timestep(model, isinstance(state, PureState2))
    cur = state
    t = t_grid[0]
    prev_norm = cur.norm_sq
    for tk in t_grid:
        while t < tk - 1e-15:
            step = min(dt, tk - t)
            cur = _rk4_step(cur, model, step)
            t += step
            nrm = cur.norm_sq
            if nrm > prev_norm + 1e-6:
                raise StepInstabilityError(
                    f"norm increased {prev_norm} -> {nrm} at t = {t}"
                )
            prev_norm = nrm
        _record_point(cur, obs)
    return _finalize(t_grid, obs)


def _jump_candidates(state: State, model: EffectiveModel):
    """Post-jump (unnormalized) states and weights lambda_nu |S_nu psi|^2."""
    rates, vecs = model.jump_basis
    if isinstance(state, PureState1):
        overlaps = vecs.conj().T @ state.amplitudes  # S_nu |psi> -> scalar
        weights = rates * np.abs(overlaps) ** 2
        return weights, ("ground", overlaps)
    lowered = state.pair_matrix @ vecs.conj()  # column nu: 1-exc amplitudes
    weights = rates * np.sum(np.abs(lowered) ** 2, axis=0)
    return weights, ("one", lowered)


def sample_trajectory(
    initial: State,
    model: EffectiveModel,
    t_grid: np.ndarray,
    seed: int,
    jumps_enabled: bool = True,
) -> TrajectoryRecord:
    """Monte-Carlo wavefunction trajectory with collective jump operators.

    No-jump RK4 evolution until the squared norm crosses a uniform random
    threshold (crossing time located by bisection to 1e-9), then a jump
    operator is drawn with probability proportional to lambda_nu |S_nu psi|^2,
    applied and renormalized, descending one excitation manifold. Uses a
    counter-based Philox generator keyed by the seed for cross-platform
    reproducibility.
    """
    rng = np.random.Generator(np.random.Philox(key=seed))
    t_grid = np.asarray(t_grid, dtype=float)
    obs: dict[str, list] = {"norm_sq": [], "site_population": []}
    jumps: list[tuple[float, int, int, int]] = []

    cur: State | None = initial
    manifold = 2 if isinstance(initial, PureState2) else 1
    dt_by_manifold = {manifold: rk4_timestep(model, manifold == 2)}
    threshold = rng.uniform() if jumps_enabled else -1.0
    t = t_grid[0]
    grid_iter = iter(t_grid)
    next_out = next(grid_iter)
    done_grid = False

    def record(st: State | None):
        if st is None:
            obs["norm_sq"].append(0.0)
            obs["site_population"].append(np.zeros(model.size))
        elif jumps_enabled:
            # waiting times are encoded in the norm decay, so ensemble
            # estimators use normalized expectations
            obs["norm_sq"].append(st.norm_sq)
            obs["site_population"].append(st.site_populations() / st.norm_sq)
        else:
            _record_point(st, obs)

    while not done_grid:
        if cur is None:  # ground state: nothing evolves
            record(None)
            try:
                next_out = next(grid_iter)
            except StopIteration:
                done_grid = True
            continue
        if t >= next_out - 1e-15:
            record(cur)
            try:
                next_out = next(grid_iter)
            except StopIteration:
                done_grid = True
            continue
        dt = dt_by_manifold.setdefault(manifold, rk4_timestep(model, manifold == 2))
        step = min(dt, next_out - t)
        nxt = _rk4_step(cur, model, step)
        if jumps_enabled and nxt.norm_sq < threshold:
            # bisect the crossing time within [0, step]
            lo, hi = 0.0, step
            while hi - lo > 1e-9:
                mid = 0.5 * (lo + hi)
                probe = _rk4_step(cur, model, mid)
                if probe.norm_sq < threshold:
                    hi = mid
                else:
                    lo = mid
            t_jump = t + hi
            at_jump = _rk4_step(cur, model, hi)
            weights, (kind, payload) = _jump_candidates(at_jump, model)
            total = weights.sum()
            if total <= 0:
                # dark state cannot jump; continue without one
                cur, t = nxt, t + step
                threshold = 0.0
                continue
            nu = int(rng.choice(len(weights), p=weights / total))
            jumps.append((t_jump, nu, manifold, manifold - 1))
            if kind == "ground":
                cur = None
                manifold = 0
            else:
                amps = payload[:, nu]
                st1 = PureState1(amps)
                cur = st1.normalized()
                manifold = 1
            t = t_jump
            threshold = rng.uniform()
            continue
        cur, t = nxt, t + step

    return _finalize(t_grid, obs, jumps, seed)


def ensemble_average(
    initial: State,
    model: EffectiveModel,
    t_grid: np.ndarray,
    n_trajectories: int,
    seed: int,
    n_workers: int = 1,
) -> TrajectoryRecord:
    """Mean observables over independent trajectories (seed xor index), with
    standard errors for the total excited population.

    Trajectories are independent and reduced in index order, so the result is
    identical for any worker count.
    """
    if n_workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            records = list(
                pool.map(
                    lambda i: sample_trajectory(initial, model, t_grid, seed ^ i),
                    range(n_trajectories),
                )
            )
    else:
        records = [
            sample_trajectory(initial, model, t_grid, seed ^ i)
            for i in range(n_trajectories)
        ]
    acc: dict[str, np.ndarray] = {}
    totals = []
    for rec in records:
        for key, val in rec.observables.items():
            acc[key] = acc.get(key, 0.0) + val
        totals.append(rec.observables["site_population"].sum(axis=1))
    out = {k: v / n_trajectories for k, v in acc.items()}
    totals = np.array(totals)
    out["total_excited_population"] = totals.mean(axis=0)
    out["total_excited_stderr"] = totals.std(axis=0, ddof=1) / np.sqrt(n_trajectories)
    return TrajectoryRecord(times=np.asarray(t_grid, float), observables=out, seed=seed)


# ---------------------------------------------------------------------------
# density-matrix oracle for small systems


def _lowering_ops(m: int) -> list[np.ndarray]:
    dim = 2**m
    ops = []
    for j in range(m):
        op = np.zeros((dim, dim))
        bit = 1 << j
        for s in range(dim):
            if s & bit:
                op[s & ~bit, s] = 1.0
        ops.append(op)
    return ops


def _embed_pure_state(state: State, m: int) -> np.ndarray:
    dim = 2**m
    psi = np.zeros(dim, dtype=complex)
    if isinstance(state, PureState1):
        for j in range(m):
            psi[1 << j] = state.amplitudes[j]
    else:
        c = state.pair_matrix
        for i in range(m):
            for j in range(i + 1, m):
                psi[(1 << i) | (1 << j)] = c[i, j]
    return psi


def lindblad_reference(
    model: EffectiveModel,
    initial: State,
    t_grid: np.ndarray,
    dt: float = 1e-3,
) -> TrajectoryRecord:
    """Direct master-equation integration in the full 2^M space (M <= 4).

    RK4 with fixed dt; trace is preserved to 1e-8. Serves as the validation
    oracle for the stochastic unraveling.
    """
    m = model.size
    if m > 4:
        raise ModelError("lindblad_reference supports at most 4 emitters")
    t_grid = np.asarray(t_grid, dtype=float)
    lowers = _lowering_ops(m)
    dim = 2**m
    h_nh = np.zeros((dim, dim), dtype=complex)
    for i in range(m):
        for j in range(m):
            h_nh += model.h_eff[i, j] * (lowers[i].T @ lowers[j])
    gamma = np.asarray(model.gamma, dtype=complex)

    def rhs(rho: np.ndarray) -> np.ndarray:
        out = -1j * (h_nh @ rho - rho @ h_nh.conj().T)
        for i in range(m):
            for j in range(m):
                out += gamma[i, j] * (lowers[j] @ rho @ lowers[i].T)
        return out

    psi = _embed_pure_state(initial, m)
    rho = np.outer(psi, psi.conj())
    rho /= np.trace(rho).real

    obs: dict[str, list] = {"norm_sq": [], "site_population": [], "trace": []}
    numbers = [op.T @ op for op in lowers]

    def record(rho_now):
        pops = np.array([np.trace(n @ rho_now).real for n in numbers])
        obs["site_population"].append(pops)
        obs["norm_sq"].append(pops.sum())
        obs["trace"].append(np.trace(rho_now).real)

    t = t_grid[0]
    for tk in t_grid:
        while t < tk - 1e-12:
            step = min(dt, tk - t)
            k1 = rhs(rho)
            k2 = rhs(rho + 0.5 * step * k1)
            k3 = rhs(rho + 0.5 * step * k2)
            k4 = rhs(rho + step * k3)
            rho = rho + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            t += step
        record(rho)
    return _finalize(t_grid, obs)


# ---------------------------------------------------------------------------
# observables


def chirality(
    site_populations: np.ndarray, positions_z: np.ndarray, z_q: float
) -> float:
    """Normalized left/right asymmetry of chain populations about z_q.

    Returns NaN when the total population is below 1e-15 (undefined)."""
    left = float(np.sum(site_populations[positions_z < z_q]))
    right = float(np.sum(site_populations[positions_z > z_q]))
    denom = left + right
    if denom < 1e-15:
        return float("nan")
    return (left - right) / denom


def field_expectation(
    point: np.ndarray, state: PureState1, model: EffectiveModel
) -> np.ndarray:
    """Scattered positive-frequency field at a point, up to a global constant:
    E(r) ~ sum_j G0(r, r_j) . d_j sqrt(gamma0_j) <sigma_ge^j>."""
    from .geometry import greens_free

    out = np.zeros(3, dtype=complex)
    for amp, emitter in zip(state.amplitudes, model.emitters):
        g = greens_free(np.asarray(point, float), np.asarray(emitter.position, float))
        out += amp * np.sqrt(emitter.gamma0) * (g @ np.asarray(emitter.dipole))
    return out
