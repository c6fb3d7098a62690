//! Measurement configurations: KCBS pentagrams, the two-qubit magic square,
//! decay-sign assignments and Heisenberg-dressed time-dependent observables.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::evolution::{single_particle_kraus, DecayParams};
use crate::linalg::{pauli_x, pauli_y, pauli_z, ComplexMatrix, ComplexVector, DEFAULT_TOL};
use crate::{Error, Result};

/// Orthogonality tolerance for pentagram validation.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;
/// Unit-norm tolerance for pentagram vectors.
pub const UNIT_TOL: f64 = 1e-12;

/// Whether pentagram vectors range over complex or real coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorMode {
    Complex,
    Real,
}

impl VectorMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "complex" => Ok(Self::Complex),
            "real" => Ok(Self::Real),
            other => Err(Error::Usage(format!(
                "unknown vector mode '{other}' (expected complex|real)"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Complex => "complex",
            Self::Real => "real",
        }
    }
}

/// Five unit vectors with cyclic orthogonality: one KCBS measurement
/// configuration.
#[derive(Debug, Clone)]
pub struct Pentagram {
    dim: usize,
    vectors: Vec<ComplexVector>,
}

impl Pentagram {
    /// Validates unit norms (1e-12) and cyclic orthogonality (1e-9).
    pub fn new(vectors: Vec<ComplexVector>) -> Result<Self> {
        if vectors.len() != 5 {
            return Err(Error::DegenerateConfiguration(format!(
                "pentagram needs 5 vectors, got {}",
                vectors.len()
            )));
        }
        let dim = vectors[0].dim();
        if dim < 3 {
            return Err(Error::DegenerateConfiguration(format!(
                "pentagram dimension must be >= 3, got {dim}"
            )));
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "pentagram vector {} has dim {} instead of {dim}",
                    i + 1,
                    v.dim()
                )));
            }
            if !v.is_unit(UNIT_TOL) {
                return Err(Error::DegenerateConfiguration(format!(
                    "pentagram vector {} has norm {:.17}",
                    i + 1,
                    v.norm()
                )));
            }
        }
        for i in 0..5 {
            let overlap = vectors[i].dot(&vectors[(i + 1) % 5]).norm();
            if overlap > ORTHOGONALITY_TOL {
                return Err(Error::DegenerateConfiguration(format!(
                    "vectors {} and {} overlap by {:.3e}",
                    i + 1,
                    (i + 1) % 5 + 1,
                    overlap
                )));
            }
        }
        Ok(Self { dim, vectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[ComplexVector] {
        &self.vectors
    }

    /// The dichotomic observables `O_i = 2|v_i><v_i| - 1`.
    pub fn observables(&self) -> Vec<ComplexMatrix> {
        let id = ComplexMatrix::identity(self.dim);
        self.vectors
            .iter()
            .map(|v| v.projector().scale(Complex64::new(2.0, 0.0)).sub(&id))
            .collect()
    }

    /// Largest cyclic overlap `|<v_i|v_{i+1}>|`.
    pub fn orthogonality_residual(&self) -> f64 {
        (0..5)
            .map(|i| self.vectors[i].dot(&self.vectors[(i + 1) % 5]).norm())
            .fold(0.0, f64::max)
    }

    /// Plain-text serialization: one line per vector,
    /// `v<i> re im re im ...` with 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, v) in self.vectors.iter().enumerate() {
            out.push_str(&format!("v{}", i + 1));
            for z in v.entries() {
                out.push_str(&format!(" {:.16e} {:.16e}", z.re, z.im));
            }
            out.push('\n');
        }
        out
    }

    /// Parse the [`Pentagram::to_text`] format and re-validate.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut vectors = Vec::new();
        for (i, line) in text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .enumerate()
        {
            let mut tokens = line.split_whitespace();
            let tag = tokens.next().unwrap_or_default();
            if tag != format!("v{}", i + 1) {
                return Err(Error::Usage(format!(
                    "expected line tag v{}, found '{tag}'",
                    i + 1
                )));
            }
            let values: Vec<f64> = tokens
                .map(|tok| {
                    tok.parse::<f64>()
                        .map_err(|e| Error::Usage(format!("bad float '{tok}': {e}")))
                })
                .collect::<Result<_>>()?;
            if values.len() < 6 || values.len() % 2 != 0 {
                return Err(Error::Usage(format!(
                    "line v{} must hold re/im pairs for dim >= 3",
                    i + 1
                )));
            }
            let entries = values
                .chunks(2)
                .map(|c| Complex64::new(c[0], c[1]))
                .collect();
            vectors.push(ComplexVector::from_entries(entries));
        }
        Pentagram::new(vectors)
    }
}

/// The +-1 values assigned to the decayed outcome of each dichotomic
/// question (5 for KCBS, 9 for the magic square).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignAssignment {
    signs: Vec<i8>,
}

impl SignAssignment {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::OutOfRange("signs must be +1 or -1".into()));
        }
        Ok(Self { signs })
    }

    pub fn all_plus(n: usize) -> Self {
        Self { signs: vec![1; n] }
    }

    pub fn all_minus(n: usize) -> Self {
        Self { signs: vec![-1; n] }
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    /// Cyclic coefficient `c = sum_i s_i s_{i+1 mod n}`.
    pub fn cycle_coefficient(&self) -> i64 {
        let n = self.signs.len();
        (0..n)
            .map(|i| self.signs[i] as i64 * self.signs[(i + 1) % n] as i64)
            .sum()
    }
}

/// The nine dichotomic two-qubit observables of the magic square.
///
/// Grid layout (row-major):
///
/// ```text
///   sx(x)1   1(x)sx   sx(x)sx
///   1(x)sz   sz(x)1   sz(x)sz
///   sx(x)sz  sz(x)sx  sy(x)sy
/// ```
///
/// Entries within each row and column commute; every row multiplies to `+1`,
/// the columns to `+1, +1, -1`. The third-column parity is what rules out a
/// noncontextual +-1 assignment.
#[derive(Debug, Clone)]
pub struct MagicSquare {
    ops: Vec<ComplexMatrix>,
}

/// Builds the canonical magic square.
pub fn magic_square() -> MagicSquare {
    let id = ComplexMatrix::identity(2);
    let (sx, sy, sz) = (pauli_x(), pauli_y(), pauli_z());
    let ops = vec![
        sx.tensor(&id),
        id.tensor(&sx),
        sx.tensor(&sx),
        id.tensor(&sz),
        sz.tensor(&id),
        sz.tensor(&sz),
        sx.tensor(&sz),
        sz.tensor(&sx),
        sy.tensor(&sy),
    ];
    MagicSquare { ops }
}

impl MagicSquare {
    pub fn op(&self, row: usize, col: usize) -> &ComplexMatrix {
        &self.ops[3 * row + col]
    }

    /// The six measurement contexts: three rows then three columns, each as
    /// the (row, col) index triple.
    pub fn contexts() -> [[(usize, usize); 3]; 6] {
        [
            [(0, 0), (0, 1), (0, 2)],
            [(1, 0), (1, 1), (1, 2)],
            [(2, 0), (2, 1), (2, 2)],
            [(0, 0), (1, 0), (2, 0)],
            [(0, 1), (1, 1), (2, 1)],
            [(0, 2), (1, 2), (2, 2)],
        ]
    }

    /// Sign with which each context enters the square functional: rows and
    /// the first two columns positively, the third column negated.
    pub fn context_sign(context_index: usize) -> f64 {
        if context_index == 5 {
            -1.0
        } else {
            1.0
        }
    }

    /// Product of the three operators of a context.
    pub fn context_product(&self, context: &[(usize, usize); 3]) -> ComplexMatrix {
        let mut prod = ComplexMatrix::identity(4);
        for &(r, c) in context {
            prod = prod.mul(self.op(r, c));
        }
        prod
    }

    /// Max residual over all structural invariants: Hermiticity, squares to
    /// identity, intra-context commutation, row products `+1` and column
    /// products `+1, +1, -1`.
    pub fn verify(&self) -> f64 {
        let id = ComplexMatrix::identity(4);
        let mut worst: f64 = 0.0;
        for op in &self.ops {
            worst = worst.max(op.hermiticity_residual());
            worst = worst.max(op.mul(op).max_abs_diff(&id));
        }
        for (k, context) in Self::contexts().iter().enumerate() {
            for a in 0..3 {
                for b in (a + 1)..3 {
                    let (ra, ca) = context[a];
                    let (rb, cb) = context[b];
                    let ab = self.op(ra, ca).mul(self.op(rb, cb));
                    let ba = self.op(rb, cb).mul(self.op(ra, ca));
                    worst = worst.max(ab.max_abs_diff(&ba));
                }
            }
            let target = id.scale(Complex64::new(Self::context_sign(k), 0.0));
            worst = worst.max(self.context_product(context).max_abs_diff(&target));
        }
        worst
    }
}

fn random_unit_vector<R: Rng>(dim: usize, rng: &mut R, mode: VectorMode) -> ComplexVector {
    loop {
        let entries: Vec<Complex64> = (0..dim)
            .map(|_| {
                let re: f64 = standard_normal(rng);
                let im = match mode {
                    VectorMode::Complex => standard_normal(rng),
                    VectorMode::Real => 0.0,
                };
                Complex64::new(re, im)
            })
            .collect();
        if let Some(v) = ComplexVector::from_entries(entries).normalized(1e-6) {
            return v;
        }
    }
}

/// Box-Muller; avoids pulling in rand_distr for one distribution.
fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Component of `v` orthogonal to the (not necessarily orthonormal) span of
/// `basis`, normalized; `None` when the residual norm falls below `eps`.
fn orthogonal_component(
    v: &ComplexVector,
    basis: &[&ComplexVector],
    eps: f64,
) -> Option<ComplexVector> {
    let mut ortho: Vec<ComplexVector> = Vec::new();
    for b in basis {
        let mut w = (*b).clone();
        for o in &ortho {
            w = w.sub(&o.scale(o.dot(&w)));
        }
        if let Some(u) = w.normalized(1e-12) {
            ortho.push(u);
        }
    }
    let mut w = v.clone();
    for o in &ortho {
        w = w.sub(&o.scale(o.dot(&w)));
    }
    w.normalized(eps)
}

/// Draw a random pentagram: `v1` Haar-random, each following vector
/// Haar-random in the orthogonal complement of its predecessor, and `v5`
/// replaced by its component orthogonal to both `v4` and `v1`.
///
/// Deterministic for a fixed seed. Fails with `DegenerateConfiguration` when
/// 100 consecutive draws leave a `v5` residual below 1e-6.
pub fn random_pentagram(dim: usize, seed: u64) -> Result<Pentagram> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    random_pentagram_with_rng(dim, &mut rng, VectorMode::Complex)
}

/// RNG- and mode-parametrized variant used by the optimizer restarts.
pub fn random_pentagram_with_rng<R: Rng>(
    dim: usize,
    rng: &mut R,
    mode: VectorMode,
) -> Result<Pentagram> {
    if dim < 3 {
        return Err(Error::DegenerateConfiguration(format!(
            "pentagram dimension must be >= 3, got {dim}"
        )));
    }
    for _ in 0..100 {
        let v1 = random_unit_vector(dim, rng, mode);
        let mut vectors = vec![v1];
        let mut ok = true;
        for _ in 1..5 {
            let draw = random_unit_vector(dim, rng, mode);
            match orthogonal_component(&draw, &[vectors.last().unwrap()], 1e-6) {
                Some(v) => vectors.push(v),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let closed = orthogonal_component(&vectors[4].clone(), &[&vectors[3], &vectors[0]], 1e-6);
        match closed {
            Some(v5) => {
                vectors[4] = v5;
                if let Ok(pg) = Pentagram::new(vectors) {
                    return Ok(pg);
                }
            }
            None => continue,
        }
    }
    Err(Error::DegenerateConfiguration(
        "no valid pentagram in 100 draws".into(),
    ))
}

/// Close a raw 5-tuple of vectors into a valid pentagram by sequential
/// orthogonalization (each vector against its predecessor, `v5` against both
/// `v4` and `v1`). Returns `None` when any residual norm drops below 1e-6.
pub fn close_pentagram(raw: &[ComplexVector]) -> Option<Pentagram> {
    assert_eq!(raw.len(), 5);
    let v1 = raw[0].normalized(1e-6)?;
    let mut vectors = vec![v1];
    for item in raw.iter().take(4).skip(1) {
        let v = orthogonal_component(item, &[vectors.last().unwrap()], 1e-6)?;
        vectors.push(v);
    }
    let v5 = orthogonal_component(&raw[4], &[&vectors[3], &vectors[0]], 1e-6)?;
    vectors.push(v5);
    Pentagram::new(vectors).ok()
}

/// The symmetric qutrit configuration reaching the five-cycle quantum
/// optimum `5 - 4 sqrt(5)`, together with its apex state `(0, 0, 1)`.
pub fn kcbs_optimal_qutrit() -> (Pentagram, ComplexVector) {
    let c = (PI / 5.0).cos();
    let cos_theta = (c / (1.0 + c)).sqrt();
    let sin_theta = (1.0 - c / (1.0 + c)).sqrt();
    let vectors = (1..=5)
        .map(|i| {
            let phi = 4.0 * PI * i as f64 / 5.0;
            ComplexVector::from_real(&[
                sin_theta * phi.cos(),
                sin_theta * phi.sin(),
                cos_theta,
            ])
        })
        .collect();
    let pg = Pentagram::new(vectors).expect("canonical qutrit configuration is valid");
    (pg, ComplexVector::basis(3, 2))
}

/// Heisenberg-picture single-party observable absorbing decay into the
/// operator: `D(P, t, s) = K_s^dag (2P - 1) K_s + s K_d^dag K_d`.
#[derive(Debug, Clone)]
pub struct DressedObservable {
    matrix: ComplexMatrix,
    time: f64,
    sign: i8,
    projector: ComplexMatrix,
}

impl DressedObservable {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn projector(&self) -> &ComplexMatrix {
        &self.projector
    }
}

/// Check that `p` is a Hermitian projector to 1e-10.
pub fn require_projector(p: &ComplexMatrix) -> Result<()> {
    let herm = p.hermiticity_residual();
    if herm > DEFAULT_TOL {
        return Err(Error::NotAProjector(format!(
            "not Hermitian (residual {herm:.3e})"
        )));
    }
    let idem = p.mul(p).max_abs_diff(p);
    if idem > DEFAULT_TOL {
        return Err(Error::NotAProjector(format!(
            "P^2 differs from P by {idem:.3e}"
        )));
    }
    Ok(())
}

/// Dress a single-party projector with the decay channel at time `t`,
/// assigning `sign` to the decayed outcome.
pub fn dress_local(
    p_op: &ComplexMatrix,
    params: &DecayParams,
    t: f64,
    sign: i8,
) -> Result<DressedObservable> {
    if p_op.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "dressed observables are single-party 2x2, got dim {}",
            p_op.dim()
        )));
    }
    require_projector(p_op)?;
    if sign != 1 && sign != -1 {
        return Err(Error::OutOfRange(format!("sign must be +-1, got {sign}")));
    }
    let (ks, kd) = single_particle_kraus(params, t)?;
    let dichotomic = p_op
        .scale(Complex64::new(2.0, 0.0))
        .sub(&ComplexMatrix::identity(2));
    let surviving = ks.adjoint().mul(&dichotomic).mul(&ks);
    let decayed = kd
        .adjoint()
        .mul(&kd)
        .scale(Complex64::new(sign as f64, 0.0));
    let matrix = surviving.add(&decayed);
    debug_assert!(matrix.is_hermitian(1e-12));
    Ok(DressedObservable {
        matrix,
        time: t,
        sign,
        projector: p_op.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::bloch_projector;

    #[test]
    fn magic_square_row_products_are_identity() {
        let sq = magic_square();
        let id = ComplexMatrix::identity(4);
        for r in 0..3 {
            let prod = sq.context_product(&MagicSquare::contexts()[r]);
            assert!(prod.max_abs_diff(&id) < 1e-12);
        }
    }

    #[test]
    fn magic_square_column_products() {
        let sq = magic_square();
        let id = ComplexMatrix::identity(4);
        let c1 = sq.context_product(&MagicSquare::contexts()[3]);
        let c2 = sq.context_product(&MagicSquare::contexts()[4]);
        let c3 = sq.context_product(&MagicSquare::contexts()[5]);
        assert!(c1.max_abs_diff(&id) < 1e-12);
        assert!(c2.max_abs_diff(&id) < 1e-12);
        assert!(c3.max_abs_diff(&id.scale(Complex64::new(-1.0, 0.0))) < 1e-12);
    }

    #[test]
    fn magic_square_parity_obstruction() {
        // Product of the three row products is +1, of the column products -1.
        let sq = magic_square();
        let contexts = MagicSquare::contexts();
        let mut rows = ComplexMatrix::identity(4);
        let mut cols = ComplexMatrix::identity(4);
        for k in 0..3 {
            rows = rows.mul(&sq.context_product(&contexts[k]));
            cols = cols.mul(&sq.context_product(&contexts[3 + k]));
        }
        assert!(rows.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
        let minus = ComplexMatrix::identity(4).scale(Complex64::new(-1.0, 0.0));
        assert!(cols.max_abs_diff(&minus) < 1e-12);
    }

    #[test]
    fn magic_square_verify_residual() {
        assert!(magic_square().verify() < 1e-12);
    }

    #[test]
    fn random_pentagram_is_deterministic() {
        let a = random_pentagram(4, 7).unwrap();
        let b = random_pentagram(4, 7).unwrap();
        for (va, vb) in a.vectors().iter().zip(b.vectors()) {
            for (x, y) in va.entries().iter().zip(vb.entries()) {
                assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn random_pentagram_valid_at_dim_three() {
        let pg = random_pentagram(3, 7).unwrap();
        assert!(pg.orthogonality_residual() < 1e-9);
    }

    #[test]
    fn random_pentagram_many_seeds() {
        for seed in 0..200 {
            let pg = random_pentagram(4, seed).unwrap();
            assert!(pg.orthogonality_residual() < 1e-9);
        }
    }

    #[test]
    fn qutrit_optimum_configuration() {
        let (pg, state) = kcbs_optimal_qutrit();
        assert!(pg.orthogonality_residual() < 1e-10);
        let overlap: f64 = pg
            .vectors()
            .iter()
            .map(|v| v.dot(&state).norm_sqr())
            .sum();
        assert!((overlap - 5f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn pentagram_observables_commute_cyclically() {
        let pg = random_pentagram(4, 3).unwrap();
        let obs = pg.observables();
        for i in 0..5 {
            let a = &obs[i];
            let b = &obs[(i + 1) % 5];
            assert!(a.mul(b).max_abs_diff(&b.mul(a)) < 1e-9);
        }
    }

    #[test]
    fn pentagram_text_round_trip() {
        let pg = random_pentagram(4, 11).unwrap();
        let text = pg.to_text();
        let back = Pentagram::from_text(&text).unwrap();
        for (va, vb) in pg.vectors().iter().zip(back.vectors()) {
            for (x, y) in va.entries().iter().zip(vb.entries()) {
                assert_eq!(x, y, "17 significant digits must round-trip f64");
            }
        }
    }

    #[test]
    fn pentagram_rejects_overlapping_neighbors() {
        let e1 = ComplexVector::basis(3, 0);
        let e2 = ComplexVector::basis(3, 1);
        let vectors = vec![e1.clone(), e1.clone(), e2.clone(), e1, e2];
        assert!(matches!(
            Pentagram::new(vectors),
            Err(Error::DegenerateConfiguration(_))
        ));
    }

    #[test]
    fn dressing_at_time_zero_is_bare_observable() {
        let p = bloch_projector([1.0, 0.0, 0.0]);
        let d = dress_local(&p, &DecayParams::kaon(), 0.0, -1).unwrap();
        let bare = p
            .scale(Complex64::new(2.0, 0.0))
            .sub(&ComplexMatrix::identity(2));
        assert!(d.matrix().max_abs_diff(&bare) < 1e-15);
    }

    #[test]
    fn dressing_at_late_time_is_signed_identity() {
        let p = bloch_projector([0.0, 0.0, 1.0]);
        for sign in [-1i8, 1] {
            let d = dress_local(&p, &DecayParams::new(1.0, 0.2, 0.5).unwrap(), 200.0, sign)
                .unwrap();
            let target = ComplexMatrix::identity(2).scale(Complex64::new(sign as f64, 0.0));
            assert!(d.matrix().max_abs_diff(&target) < 1e-10);
        }
    }

    #[test]
    fn dressed_norm_bounded_by_one() {
        let params = DecayParams::kaon();
        for seed in 0..20 {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let v = random_unit_vector(2, &mut rng, VectorMode::Complex);
            let p = v.projector();
            for &t in &[0.0, 0.3, 1.0, 2.7, 5.0] {
                let d = dress_local(&p, &params, t, if seed % 2 == 0 { 1 } else { -1 }).unwrap();
                assert!(d.matrix().hermitian_norm().unwrap() <= 1.0 + 1e-10);
            }
        }
    }

    #[test]
    fn dressing_complement_identity() {
        // D(P, t, s) + D(1 - P, t, s) = 2 s K_d^dag K_d
        let params = DecayParams::new(0.9, 0.1, 0.4).unwrap();
        let p = bloch_projector([0.6, 0.0, 0.8]);
        let q = ComplexMatrix::identity(2).sub(&p);
        let t = 1.2;
        for sign in [-1i8, 1] {
            let dp = dress_local(&p, &params, t, sign).unwrap();
            let dq = dress_local(&q, &params, t, sign).unwrap();
            let (_, kd) = single_particle_kraus(&params, t).unwrap();
            let target = kd
                .adjoint()
                .mul(&kd)
                .scale(Complex64::new(2.0 * sign as f64, 0.0));
            assert!(dp.matrix().add(dq.matrix()).max_abs_diff(&target) < 1e-12);
        }
    }

    #[test]
    fn non_projector_rejected() {
        let not_p = pauli_x();
        assert!(matches!(
            dress_local(&not_p, &DecayParams::kaon(), 1.0, 1),
            Err(Error::NotAProjector(_))
        ));
    }

    #[test]
    fn sign_assignment_validation() {
        assert!(SignAssignment::new(vec![1, -1, 1]).is_ok());
        assert!(SignAssignment::new(vec![1, 0, 1]).is_err());
        assert_eq!(SignAssignment::all_minus(5).cycle_coefficient(), 5);
    }
}
