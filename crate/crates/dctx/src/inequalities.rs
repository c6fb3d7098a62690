//! Evaluators for the decay-modified contextuality and Bell criteria: KCBS
//! (stable and decay forms), the magic square (closed form and generic), the
//! three-particle criterion, renormalized CHSH, dressed ("dynamical") CHSH,
//! and the brute-force sign-assignment enumerations.

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::evolution::{DecayParams, JointState, SectorLabel, SectorState};
use crate::linalg::{
    bloch_projector, pauli_x, pauli_y, pauli_z, ComplexMatrix, DEFAULT_TOL,
};
use crate::observables::{
    dress_local, require_projector, MagicSquare, Pentagram, SignAssignment,
};
use crate::{Error, Result};

/// Which side of the classical bound a criterion tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSide {
    Lower,
    Upper,
}

/// Outcome of one criterion evaluation.
#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub value: f64,
    pub classical_bound: f64,
    pub bound_side: BoundSide,
    pub violated: bool,
    pub surviving_weight: f64,
}

impl CriterionResult {
    /// `violated` is derived from the value, bound and side.
    pub fn new(value: f64, classical_bound: f64, bound_side: BoundSide, surviving_weight: f64) -> Self {
        let violated = match bound_side {
            BoundSide::Lower => value < classical_bound,
            BoundSide::Upper => value > classical_bound,
        };
        Self {
            value,
            classical_bound,
            bound_side,
            violated,
            surviving_weight,
        }
    }
}

/// Five-cycle functional `sum_i tr(O_i O_{i+1} rho)` for a normalized state.
pub fn kcbs_value(pg: &Pentagram, rho: &ComplexMatrix) -> Result<f64> {
    if pg.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "pentagram dim {} vs state dim {}",
            pg.dim(),
            rho.dim()
        )));
    }
    let tr = rho.validate_density_block(DEFAULT_TOL)?;
    if (tr - 1.0).abs() > DEFAULT_TOL {
        return Err(Error::InvalidState(format!(
            "kcbs_value expects a normalized state, trace = {tr}"
        )));
    }
    Ok(kcbs_quantum_part(pg, rho))
}

/// The same functional without normalization checks; linear in `rho_s`.
pub fn kcbs_quantum_part(pg: &Pentagram, rho_s: &ComplexMatrix) -> f64 {
    let obs = pg.observables();
    (0..5)
        .map(|i| obs[i].mul(&obs[(i + 1) % 5]).expectation(rho_s))
        .sum()
}

/// Decay KCBS: quantum part on the surviving block plus
/// `c (1 - tr rho_s)` with `c = sum_i s_i s_{i+1}`; classical bound -3.
pub fn kcbs_decay_value(
    pg: &Pentagram,
    signs: &SignAssignment,
    js: &JointState,
) -> Result<CriterionResult> {
    if signs.len() != 5 {
        return Err(Error::DimensionMismatch(format!(
            "KCBS needs 5 signs, got {}",
            signs.len()
        )));
    }
    if pg.dim() != js.rho_s().dim() {
        return Err(Error::DimensionMismatch(format!(
            "pentagram dim {} vs surviving block dim {}",
            pg.dim(),
            js.rho_s().dim()
        )));
    }
    let c = signs.cycle_coefficient() as f64;
    let value = kcbs_quantum_part(pg, js.rho_s()) + c * js.decayed_weight();
    Ok(CriterionResult::new(
        value,
        -3.0,
        BoundSide::Lower,
        js.surviving_trace(),
    ))
}

/// Brute-force minimizer of `c = sum_i s_i s_{i+1 mod n}` over all `2^n`
/// assignments; ties resolve to the first assignment in an enumeration that
/// flips later entries last (all `+1` first).
pub fn optimal_cycle_signs(n: usize) -> Result<(SignAssignment, i64)> {
    if !(3..=20).contains(&n) {
        return Err(Error::OutOfRange(format!(
            "cycle length must be in 3..=20, got {n}"
        )));
    }
    let mut best_mask = 0u32;
    let mut best = i64::MAX;
    for mask in 0..(1u32 << n) {
        let sign = |i: usize| -> i64 {
            if mask >> i & 1 == 0 {
                1
            } else {
                -1
            }
        };
        let c: i64 = (0..n).map(|i| sign(i) * sign((i + 1) % n)).sum();
        if c < best {
            best = c;
            best_mask = mask;
        }
    }
    let signs = (0..n)
        .map(|i| if best_mask >> i & 1 == 0 { 1i8 } else { -1i8 })
        .collect();
    Ok((SignAssignment::new(signs)?, best))
}

/// Closed-form magic-square decay value `2 tr rho_s + 4`, upper bound 4.
pub fn mp_decay_closed_form(surviving_trace: f64) -> Result<CriterionResult> {
    if !(0.0..=1.0 + DEFAULT_TOL).contains(&surviving_trace) {
        return Err(Error::OutOfRange(format!(
            "surviving trace must lie in [0, 1], got {surviving_trace}"
        )));
    }
    Ok(CriterionResult::new(
        2.0 * surviving_trace + 4.0,
        4.0,
        BoundSide::Upper,
        surviving_trace,
    ))
}

/// Generic magic-square decay functional: for each of the six contexts
/// (third column negated), `tr(A B C rho_s) + (s_a s_b s_c) w_d`.
pub fn mp_decay_generic(
    square: &MagicSquare,
    signs: &SignAssignment,
    js: &JointState,
) -> Result<CriterionResult> {
    if signs.len() != 9 {
        return Err(Error::DimensionMismatch(format!(
            "magic square needs 9 signs, got {}",
            signs.len()
        )));
    }
    if js.rho_s().dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "magic square acts on two qubits, surviving block has dim {}",
            js.rho_s().dim()
        )));
    }
    let w_d = js.decayed_weight();
    let mut value = 0.0;
    for (k, context) in MagicSquare::contexts().iter().enumerate() {
        let quantum = square.context_product(context).expectation(js.rho_s());
        let decayed_sign: f64 = context
            .iter()
            .map(|&(r, c)| signs.signs()[3 * r + c] as f64)
            .product();
        value += MagicSquare::context_sign(k) * (quantum + decayed_sign * w_d);
    }
    Ok(CriterionResult::new(
        value,
        4.0,
        BoundSide::Upper,
        js.surviving_trace(),
    ))
}

/// Brute force over all 512 square sign assignments, maximizing the decayed
/// coefficient `sum_contexts (+-) s_a s_b s_c`; the maximum is 4 (the
/// noncontextual bound of the square functional).
pub fn optimal_square_signs() -> (SignAssignment, i64) {
    let contexts = MagicSquare::contexts();
    let mut best_mask = 0u32;
    let mut best = i64::MIN;
    for mask in 0..(1u32 << 9) {
        let sign = |r: usize, c: usize| -> i64 {
            if mask >> (3 * r + c) & 1 == 0 {
                1
            } else {
                -1
            }
        };
        let mut coeff = 0i64;
        for (k, context) in contexts.iter().enumerate() {
            let prod: i64 = context.iter().map(|&(r, c)| sign(r, c)).product();
            coeff += if MagicSquare::context_sign(k) < 0.0 {
                -prod
            } else {
                prod
            };
        }
        if coeff > best {
            best = coeff;
            best_mask = mask;
        }
    }
    let signs = (0..9)
        .map(|i| if best_mask >> i & 1 == 0 { 1i8 } else { -1i8 })
        .collect();
    (
        SignAssignment::new(signs).expect("signs are +-1 by construction"),
        best,
    )
}

/// Three-particle criterion `3 + 2(tr rho_sss + tr rho_sds + tr rho_dsd)`,
/// upper bound 3.
pub fn mermin3_decay(st: &SectorState) -> Result<CriterionResult> {
    if st.n_particles() != 3 {
        return Err(Error::DimensionMismatch(format!(
            "three-particle criterion needs 3 particles, got {}",
            st.n_particles()
        )));
    }
    let tr = |label: &str| st.block_trace(&SectorLabel::parse(label).expect("valid label"));
    let value = 3.0 + 2.0 * (tr("sss") + tr("sds") + tr("dsd"));
    Ok(CriterionResult::new(
        value,
        3.0,
        BoundSide::Upper,
        tr("sss"),
    ))
}

/// CHSH settings: projectors for the two settings of each party.
#[derive(Debug, Clone)]
pub struct ChshSettings {
    pub a: ComplexMatrix,
    pub a_prime: ComplexMatrix,
    pub b: ComplexMatrix,
    pub b_prime: ComplexMatrix,
}

impl ChshSettings {
    pub fn new(
        a: ComplexMatrix,
        a_prime: ComplexMatrix,
        b: ComplexMatrix,
        b_prime: ComplexMatrix,
    ) -> Result<Self> {
        for p in [&a, &a_prime, &b, &b_prime] {
            if p.dim() != 2 {
                return Err(Error::DimensionMismatch(
                    "CHSH settings are single-qubit projectors".into(),
                ));
            }
            require_projector(p)?;
        }
        Ok(Self {
            a,
            a_prime,
            b,
            b_prime,
        })
    }

    /// From Bloch unit vectors, one per observable.
    pub fn from_bloch(a: [f64; 3], a_prime: [f64; 3], b: [f64; 3], b_prime: [f64; 3]) -> Self {
        Self {
            a: bloch_projector(a),
            a_prime: bloch_projector(a_prime),
            b: bloch_projector(b),
            b_prime: bloch_projector(b_prime),
        }
    }

    /// The standard settings reaching `2 sqrt(2)` on the antisymmetric Bell
    /// state (value positive).
    pub fn tsirelson() -> Self {
        let s = 1.0 / 2f64.sqrt();
        Self::from_bloch(
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0],
            [-s, 0.0, -s],
            [s, 0.0, -s],
        )
    }

    /// The Bell operator `A(x)B + A(x)B' + A'(x)B - A'(x)B'` with
    /// `X = 2P - 1`.
    pub fn bell_operator(&self) -> ComplexMatrix {
        let two = Complex64::new(2.0, 0.0);
        let id = ComplexMatrix::identity(2);
        let a = self.a.scale(two).sub(&id);
        let ap = self.a_prime.scale(two).sub(&id);
        let b = self.b.scale(two).sub(&id);
        let bp = self.b_prime.scale(two).sub(&id);
        a.tensor(&b.add(&bp)).add(&ap.tensor(&b.sub(&bp)))
    }
}

/// Renormalized CHSH on the surviving block: `tr(Bell rho_ss(t))` with the
/// time-dependent bound `2 tr rho_ss(t)`.
///
/// Tests the upper side; the bound is symmetric, so flip the settings' signs
/// to probe the lower side.
pub fn chsh_renormalized(settings: &ChshSettings, js: &JointState) -> Result<CriterionResult> {
    if js.rho_s().dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "CHSH needs a two-qubit surviving block, got dim {}",
            js.rho_s().dim()
        )));
    }
    let value = settings.bell_operator().expectation(js.rho_s());
    let tr = js.surviving_trace();
    Ok(CriterionResult::new(
        value,
        2.0 * tr,
        BoundSide::Upper,
        tr,
    ))
}

/// Correlation matrix `T_ij = tr(rho sigma_i (x) sigma_j)` of a two-qubit
/// state.
pub fn correlation_matrix(rho: &ComplexMatrix) -> Matrix3<f64> {
    let paulis = [pauli_x(), pauli_y(), pauli_z()];
    Matrix3::from_fn(|i, j| paulis[i].tensor(&paulis[j]).expectation(rho))
}

/// Horodecki criterion: the maximal CHSH value `2 sqrt(m1 + m2)` of a
/// normalized two-qubit state, from the two largest eigenvalues of `T^T T`.
pub fn horodecki_max(rho: &ComplexMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "Horodecki criterion needs a two-qubit state, got dim {}",
            rho.dim()
        )));
    }
    let tr = rho.validate_density_block(DEFAULT_TOL)?;
    if (tr - 1.0).abs() > DEFAULT_TOL {
        return Err(Error::InvalidState(format!(
            "horodecki_max expects a normalized state, trace = {tr}"
        )));
    }
    let t = correlation_matrix(rho);
    let m = t.transpose() * t;
    let mut eigs: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(2.0 * (eigs[0] + eigs[1]).max(0.0).sqrt())
}

/// Correlator form of the dressed CHSH functional.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChshMode {
    /// Product of local +-1 outcomes: `D_a (x) D_b` per term (default).
    LocalProduct,
    /// Joint-YES dichotomization `2 E (x) E - 1` per term, where
    /// `E = K_s^dag P K_s + K_d^dag K_d` (decay counts as YES; the sign
    /// arguments are ignored).
    JointYes,
}

/// Dressed-observable CHSH at per-side measurement times `t_l`, `t_r`.
///
/// The classical bound is 2; `surviving_weight` reports the probability that
/// both particles survive to their measurement times.
#[allow(clippy::too_many_arguments)]
pub fn dynamical_chsh(
    pa: &ComplexMatrix,
    pa_prime: &ComplexMatrix,
    pb: &ComplexMatrix,
    pb_prime: &ComplexMatrix,
    signs: &SignAssignment,
    params: &DecayParams,
    t_l: f64,
    t_r: f64,
    rho0: &ComplexMatrix,
    mode: ChshMode,
) -> Result<CriterionResult> {
    if signs.len() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "dressed CHSH needs 4 signs, got {}",
            signs.len()
        )));
    }
    if rho0.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "dressed CHSH needs a two-qubit state, got dim {}",
            rho0.dim()
        )));
    }
    let tr0 = rho0.validate_density_block(DEFAULT_TOL)?;
    if (tr0 - 1.0).abs() > DEFAULT_TOL {
        return Err(Error::InvalidState(format!(
            "dressed CHSH expects a normalized initial state, trace = {tr0}"
        )));
    }
    let s = signs.signs();
    let value = match mode {
        ChshMode::LocalProduct => {
            let da = dress_local(pa, params, t_l, s[0])?;
            let dap = dress_local(pa_prime, params, t_l, s[1])?;
            let db = dress_local(pb, params, t_r, s[2])?;
            let dbp = dress_local(pb_prime, params, t_r, s[3])?;
            let bell = da
                .matrix()
                .tensor(&db.matrix().add(dbp.matrix()))
                .add(&dap.matrix().tensor(&db.matrix().sub(dbp.matrix())));
            bell.expectation(rho0)
        }
        ChshMode::JointYes => {
            let (ks_l, kd_l) = crate::evolution::single_particle_kraus(params, t_l)?;
            let (ks_r, kd_r) = crate::evolution::single_particle_kraus(params, t_r)?;
            let effect = |p: &ComplexMatrix, ks: &ComplexMatrix, kd: &ComplexMatrix| -> Result<ComplexMatrix> {
                require_projector(p)?;
                Ok(ks.adjoint().mul(p).mul(ks).add(&kd.adjoint().mul(kd)))
            };
            let ea = effect(pa, &ks_l, &kd_l)?;
            let eap = effect(pa_prime, &ks_l, &kd_l)?;
            let eb = effect(pb, &ks_r, &kd_r)?;
            let ebp = effect(pb_prime, &ks_r, &kd_r)?;
            let id4 = ComplexMatrix::identity(4);
            let two = Complex64::new(2.0, 0.0);
            let term = |el: &ComplexMatrix, er: &ComplexMatrix| -> f64 {
                el.tensor(er).scale(two).sub(&id4).expectation(rho0)
            };
            term(&ea, &eb) + term(&ea, &ebp) + term(&eap, &eb) - term(&eap, &ebp)
        }
    };
    let (ks_l, _) = crate::evolution::single_particle_kraus(params, t_l)?;
    let (ks_r, _) = crate::evolution::single_particle_kraus(params, t_r)?;
    let survive_both = ks_l
        .adjoint()
        .mul(&ks_l)
        .tensor(&ks_r.adjoint().mul(&ks_r))
        .expectation(rho0);
    Ok(CriterionResult::new(
        value,
        2.0,
        BoundSide::Upper,
        survive_both,
    ))
}
