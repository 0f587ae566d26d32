//! Three-atom master equation in the 63-component operator basis.
//!
//! Layout: x = (⟨σ⃗₃⟩, ⟨σ⃗₂⟩, ⟨σ⃗₁⟩), y = (⟨σ⃗₂⊗σ⃗₃⟩, ⟨σ⃗₁⊗σ⃗₃⟩, ⟨σ⃗₁⊗σ⃗₂⟩),
//! z = ⟨σ⃗₁⊗σ⃗₂⊗σ⃗₃⟩, tensors flattened with the first factor major.
//! Internally every operator is addressed by a triple (i₁, i₂, i₃) with
//! iₐ = 0 for the identity and 1, 2, 3 for σ⁻, σ⁺, σᶻ.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::atom::{self, AtomParams, Mat3, C64, I};
use crate::diagrams::ContributionType;
use crate::error::{CbsError, Result};

pub const DIM: usize = 63;

/// Parameters of three atoms and their pairwise far-field couplings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThreeAtomConfig {
    /// Atoms 1, 2, 3.
    pub atoms: [AtomParams; 3],
    /// Couplings keyed by unordered pair (λ, μ), λ < μ, atoms numbered from 1.
    pub couplings: BTreeMap<(usize, usize), C64>,
}

impl ThreeAtomConfig {
    /// Identical atoms with unit couplings.
    pub fn uniform(params: AtomParams) -> Self {
        let mut couplings = BTreeMap::new();
        for pair in [(1, 2), (1, 3), (2, 3)] {
            couplings.insert(pair, C64::new(1.0, 0.0));
        }
        Self { atoms: [params; 3], couplings }
    }

    /// T_{λμ}; symmetric by construction.
    pub fn coupling(&self, lambda: usize, mu: usize) -> C64 {
        let key = (lambda.min(mu), lambda.max(mu));
        self.couplings.get(&key).copied().unwrap_or_default()
    }

    pub fn validate(&self) -> Result<()> {
        for a in &self.atoms {
            a.validate()?;
        }
        for &(l, m) in self.couplings.keys() {
            if !(1..=3).contains(&l) || !(1..=3).contains(&m) || l >= m {
                return Err(CbsError::Config(format!("invalid coupling pair ({l}, {m})")));
            }
        }
        Ok(())
    }
}

/// One summand of V: V_{λμ} (negative-frequency transfer λ → μ) or, when
/// `conjugated`, V*_{λμ} (positive-frequency transfer μ → λ).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InteractionLabel {
    pub lambda: usize,
    pub mu: usize,
    pub conjugated: bool,
}

impl InteractionLabel {
    pub fn v(lambda: usize, mu: usize) -> Self {
        Self { lambda, mu, conjugated: false }
    }

    pub fn v_star(lambda: usize, mu: usize) -> Self {
        Self { lambda, mu, conjugated: true }
    }

    /// Conjugate amplitude of the same transfer: V_{λμ} ↔ V*_{μλ}.
    pub fn conjugate(self) -> Self {
        Self { lambda: self.mu, mu: self.lambda, conjugated: !self.conjugated }
    }

    /// All twelve labels of a three-atom system.
    pub fn all() -> Vec<Self> {
        let mut out = Vec::new();
        for l in 1..=3 {
            for m in 1..=3 {
                if l != m {
                    out.push(Self::v(l, m));
                    out.push(Self::v_star(l, m));
                }
            }
        }
        out
    }
}

/// Expectation-value vector in the 63-component layout plus the value of ⟨1⟩
/// (one for a full state, zero for a perturbative correction).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector63 {
    pub data: DVector<C64>,
    pub identity: C64,
}

/// Which intensity to read off a state vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntensityKind {
    /// ⟨σ_λ⁺σ_λ⁻⟩ = (1 + ⟨σ_λᶻ⟩)/2.
    Background(usize),
    /// ⟨σ_λ⁺ ⊗ σ_μ⁻⟩.
    Interference(usize, usize),
}

/// Position of operator triple (i₁, i₂, i₃) in the 63 layout.
pub fn layout_index(t: [usize; 3]) -> Option<usize> {
    let [a, b, c] = t;
    match (a > 0, b > 0, c > 0) {
        (false, false, false) => None,
        (false, false, true) => Some(c - 1),
        (false, true, false) => Some(3 + b - 1),
        (true, false, false) => Some(6 + a - 1),
        (false, true, true) => Some(9 + (b - 1) * 3 + (c - 1)),
        (true, false, true) => Some(18 + (a - 1) * 3 + (c - 1)),
        (true, true, false) => Some(27 + (a - 1) * 3 + (b - 1)),
        (true, true, true) => Some(36 + (a - 1) * 9 + (b - 1) * 3 + (c - 1)),
    }
}

/// Operator triples in layout order.
pub fn layout_triples() -> Vec<[usize; 3]> {
    let mut out = vec![[0; 3]; DIM];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                if let Some(k) = layout_index([a, b, c]) {
                    out[k] = [a, b, c];
                }
            }
        }
    }
    out
}

impl StateVector63 {
    pub fn zeros() -> Self {
        Self { data: DVector::zeros(DIM), identity: C64::default() }
    }

    /// Component for an operator triple; the all-identity triple gives ⟨1⟩.
    pub fn get(&self, t: [usize; 3]) -> C64 {
        layout_index(t).map_or(self.identity, |k| self.data[k])
    }

    /// Single-atom Bloch vector of atom λ.
    pub fn bloch(&self, lambda: usize) -> atom::Vec3 {
        let mut v = atom::Vec3::zeros();
        for k in 1..4 {
            let mut t = [0; 3];
            t[lambda - 1] = k;
            v[k - 1] = self.get(t);
        }
        v
    }

    /// Pair tensor ⟨σ⃗_λ ⊗ σ⃗_μ⟩ for λ < μ.
    pub fn pair(&self, lambda: usize, mu: usize) -> Mat3 {
        let mut m = Mat3::zeros();
        for i in 1..4 {
            for j in 1..4 {
                let mut t = [0; 3];
                t[lambda - 1] = i;
                t[mu - 1] = j;
                m[(i - 1, j - 1)] = self.get(t);
            }
        }
        m
    }
}

/// Reads an intensity from a state vector.
pub fn extract_intensity(v: &StateVector63, kind: IntensityKind) -> Result<C64> {
    match kind {
        IntensityKind::Background(l) => {
            check_atom(l)?;
            Ok((v.identity + v.bloch(l)[2]) / 2.0)
        }
        IntensityKind::Interference(l, m) => {
            check_atom(l)?;
            check_atom(m)?;
            if l == m {
                return Err(CbsError::Config("interference needs two distinct atoms".into()));
            }
            let mut t = [0; 3];
            t[l - 1] = 2;
            t[m - 1] = 1;
            Ok(v.get(t))
        }
    }
}

fn check_atom(l: usize) -> Result<()> {
    if (1..=3).contains(&l) {
        Ok(())
    } else {
        Err(CbsError::Config(format!("atom index {l} outside 1..=3")))
    }
}

/// Single-atom generator on (1, σ⁻, σ⁺, σᶻ): d⟨q⟩/dt = m̃·⟨q⟩.
fn single_generator(p: &AtomParams) -> [[C64; 4]; 4] {
    let m = atom::bloch_matrix(p);
    let l = atom::drive_vector(p);
    let mut g = [[C64::default(); 4]; 4];
    for i in 0..3 {
        g[i + 1][0] = l[i];
        for j in 0..3 {
            g[i + 1][j + 1] = m[(i, j)];
        }
    }
    g
}

/// Free evolution matrix A (63×63) and the constant vector Λ.
pub fn build_a_and_lambda(config: &ThreeAtomConfig) -> (DMatrix<C64>, DVector<C64>) {
    let gens: Vec<_> = config.atoms.iter().map(single_generator).collect();
    let triples = layout_triples();
    let mut a = DMatrix::zeros(DIM, DIM);
    let mut lam = DVector::zeros(DIM);
    for (row, t) in triples.iter().enumerate() {
        for (slot, gen) in gens.iter().enumerate() {
            if t[slot] == 0 {
                continue;
            }
            for (k, &coef) in gen[t[slot]].iter().enumerate() {
                if coef == C64::default() {
                    continue;
                }
                let mut src = *t;
                src[slot] = k;
                match layout_index(src) {
                    Some(col) => a[(row, col)] += coef,
                    None => lam[row] += coef,
                }
            }
        }
    }
    (a, lam)
}

/// Free evolution matrix A; independent of the couplings.
pub fn build_a(config: &ThreeAtomConfig) -> DMatrix<C64> {
    build_a_and_lambda(config).0
}

/// Λ = (L, L, L, 0₅₄).
pub fn build_lambda(config: &ThreeAtomConfig) -> DVector<C64> {
    build_a_and_lambda(config).1
}

/// Two-atom action of one interaction summand on operator pairs (a, b) of
/// atoms (lo, hi), lo < hi. Returns (a′, b′, coefficient) contributions.
fn two_atom_action(label: InteractionLabel, t: C64, a: usize, b: usize) -> Vec<(usize, usize, C64)> {
    let dp = atom::delta_plus();
    let dm = atom::delta_minus();
    let forward = label.lambda < label.mu;
    let mut out = Vec::new();
    let half = 0.5;
    match (label.conjugated, forward) {
        // v̄_{λμ}
        (false, true) => {
            if a == 2 && b > 0 {
                for k in 1..4 {
                    out.push((0, k, 2.0 * I * t * dp[(k - 1, b - 1)]));
                }
            }
            if a > 0 && b > 0 {
                for i in 1..4 {
                    for j in 1..4 {
                        out.push((i, j, -2.0 * t * dm[(i - 1, a - 1)] * dp[(j - 1, b - 1)]));
                    }
                }
            }
            if a == 0 && b > 0 {
                for j in 1..4 {
                    out.push((1, j, half * 2.0 * I * t * dp[(j - 1, b - 1)]));
                }
            }
        }
        // v̄_{μλ}
        (false, false) => {
            if b == 2 && a > 0 {
                for k in 1..4 {
                    out.push((k, 0, 2.0 * I * t * dp[(k - 1, a - 1)]));
                }
            }
            if a > 0 && b > 0 {
                for i in 1..4 {
                    for j in 1..4 {
                        out.push((i, j, -2.0 * t * dp[(i - 1, a - 1)] * dm[(j - 1, b - 1)]));
                    }
                }
            }
            if a > 0 && b == 0 {
                for i in 1..4 {
                    out.push((i, 1, half * 2.0 * I * t * dp[(i - 1, a - 1)]));
                }
            }
        }
        // v̄*_{λμ}
        (true, true) => {
            let tc = t.conj();
            if b == 1 && a > 0 {
                for k in 1..4 {
                    out.push((k, 0, -2.0 * I * tc * dm[(k - 1, a - 1)]));
                }
            }
            if a > 0 && b > 0 {
                for i in 1..4 {
                    for j in 1..4 {
                        out.push((i, j, -2.0 * tc * dm[(i - 1, a - 1)] * dp[(j - 1, b - 1)]));
                    }
                }
            }
            if a > 0 && b == 0 {
                for i in 1..4 {
                    out.push((i, 2, half * -2.0 * I * tc * dm[(i - 1, a - 1)]));
                }
            }
        }
        // v̄*_{μλ}
        (true, false) => {
            let tc = t.conj();
            if a == 1 && b > 0 {
                for k in 1..4 {
                    out.push((0, k, -2.0 * I * tc * dm[(k - 1, b - 1)]));
                }
            }
            if a > 0 && b > 0 {
                for i in 1..4 {
                    for j in 1..4 {
                        out.push((i, j, -2.0 * tc * dp[(i - 1, a - 1)] * dm[(j - 1, b - 1)]));
                    }
                }
            }
            if a == 0 && b > 0 {
                for j in 1..4 {
                    out.push((2, j, half * -2.0 * I * tc * dm[(j - 1, b - 1)]));
                }
            }
        }
    }
    out.retain(|x| x.2 != C64::default());
    out
}

fn check_label(label: InteractionLabel) -> Result<()> {
    check_atom(label.lambda)?;
    check_atom(label.mu)?;
    if label.lambda == label.mu {
        return Err(CbsError::Config("interaction label needs two distinct atoms".into()));
    }
    Ok(())
}

/// Applies one interaction summand: the two-atom identities act on the pair
/// (λ, μ) while the spectator atom's operator factor is carried along.
pub fn apply_interaction(label: InteractionLabel, v: &StateVector63, config: &ThreeAtomConfig) -> Result<StateVector63> {
    check_label(label)?;
    let t = config.coupling(label.lambda, label.mu);
    let lo = label.lambda.min(label.mu) - 1;
    let hi = label.lambda.max(label.mu) - 1;
    let mut out = StateVector63::zeros();
    for (col, tr) in layout_triples().iter().enumerate() {
        let x = v.data[col];
        if x == C64::default() {
            continue;
        }
        for (a2, b2, coef) in two_atom_action(label, t, tr[lo], tr[hi]) {
            let mut dst = *tr;
            dst[lo] = a2;
            dst[hi] = b2;
            let row = layout_index(dst).ok_or_else(|| CbsError::Internal("interaction produced a constant".into()))?;
            out.data[row] += coef * x;
        }
    }
    Ok(out)
}

/// Dense matrix of one interaction summand.
pub fn interaction_matrix(label: InteractionLabel, config: &ThreeAtomConfig) -> Result<DMatrix<C64>> {
    let mut m = DMatrix::zeros(DIM, DIM);
    for col in 0..DIM {
        let mut e = StateVector63::zeros();
        e.data[col] = C64::new(1.0, 0.0);
        let r = apply_interaction(label, &e, config)?;
        m.set_column(col, &r.data);
    }
    Ok(m)
}

/// Full interaction matrix V = Σ (V_{λμ} + V*_{λμ}).
pub fn build_v(config: &ThreeAtomConfig) -> Result<DMatrix<C64>> {
    let mut v = DMatrix::zeros(DIM, DIM);
    for l in InteractionLabel::all() {
        v += interaction_matrix(l, config)?;
    }
    Ok(v)
}

/// Fourth-order solver with G = −A⁻¹ factorized once.
pub struct MasterOracle {
    pub config: ThreeAtomConfig,
    lu: nalgebra::LU<C64, nalgebra::Dyn, nalgebra::Dyn>,
    lambda: DVector<C64>,
    cache: BTreeMap<InteractionLabel, DMatrix<C64>>,
}

impl MasterOracle {
    pub fn new(config: ThreeAtomConfig) -> Result<Self> {
        config.validate()?;
        let (a, lambda) = build_a_and_lambda(&config);
        let lu = a.lu();
        if !lu.is_invertible() {
            return Err(CbsError::Singular("three-atom evolution matrix"));
        }
        let mut cache = BTreeMap::new();
        for l in InteractionLabel::all() {
            cache.insert(l, interaction_matrix(l, &config)?);
        }
        Ok(Self { config, lu, lambda, cache })
    }

    /// G·b = −A⁻¹b.
    pub fn apply_g(&self, b: &DVector<C64>) -> DVector<C64> {
        -self.lu.solve(b).expect("factorization checked invertible")
    }

    /// Zeroth-order state GΛ.
    pub fn steady(&self) -> StateVector63 {
        StateVector63 { data: self.apply_g(&self.lambda), identity: C64::new(1.0, 0.0) }
    }

    /// G V_{l₄} G V_{l₃} G V_{l₂} G V_{l₁} G Λ for one ordered sequence.
    pub fn ordered_term(&self, seq: &[InteractionLabel]) -> Result<StateVector63> {
        let mut v = self.apply_g(&self.lambda);
        for l in seq {
            check_label(*l)?;
            v = self.apply_g(&(&self.cache[l] * v));
        }
        Ok(StateVector63 { data: v, identity: C64::default() })
    }

    /// Sum over all distinct placements of a label multiset into the V slots.
    pub fn path_term(&self, labels: &[InteractionLabel]) -> Result<StateVector63> {
        if labels.len() != 4 {
            return Err(CbsError::Config(format!("path_term needs 4 labels, got {}", labels.len())));
        }
        self.label_term(labels)
    }

    /// Correction of order |labels| carrying exactly the given label multiset;
    /// the empty multiset gives the uncoupled steady state.
    pub fn label_term(&self, labels: &[InteractionLabel]) -> Result<StateVector63> {
        if labels.is_empty() {
            return Ok(self.steady());
        }
        let mut sorted = labels.to_vec();
        sorted.sort();
        let mut acc = StateVector63::zeros();
        loop {
            acc.data += self.ordered_term(&sorted)?.data;
            if !next_permutation(&mut sorted) {
                break;
            }
        }
        Ok(acc)
    }

    /// (GV)⁴GΛ with the full interaction matrix.
    pub fn fourth_order(&self) -> StateVector63 {
        let v_full = self.cache.values().fold(DMatrix::zeros(DIM, DIM), |a, m| a + m);
        let mut v = self.apply_g(&self.lambda);
        for _ in 0..4 {
            v = self.apply_g(&(&v_full * v));
        }
        StateVector63 { data: v, identity: C64::default() }
    }
}

/// Lexicographic next permutation; false when the sequence was the last one.
pub fn next_permutation<T: Ord>(s: &mut [T]) -> bool {
    if s.len() < 2 {
        return false;
    }
    let mut i = s.len() - 1;
    while i > 0 && s[i - 1] >= s[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = s.len() - 1;
    while s[j] <= s[i - 1] {
        j -= 1;
    }
    s.swap(i - 1, j);
    s[i..].reverse();
    true
}

/// Deviations of the zeroth-order pair and triple blocks from products of single-atom steady states.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SumRuleReport {
    pub y_deviation: f64,
    pub z_deviation: f64,
}

/// Solves the y and z blocks of the zeroth-order state separately and
/// compares them with products of single-atom steady states.
pub fn sum_rule_check(config: &ThreeAtomConfig) -> Result<SumRuleReport> {
    config.validate()?;
    let (a, lam) = build_a_and_lambda(config);
    let x0 = {
        let m_plus = a.view((0, 0), (9, 9)).into_owned();
        -m_plus.lu().solve(&lam.rows(0, 9).into_owned()).ok_or(CbsError::Singular("M₊"))?
    };
    let l_plus = a.view((9, 0), (27, 9)).into_owned();
    let m_cross = a.view((9, 9), (27, 27)).into_owned();
    let y0 = -m_cross.lu().solve(&(l_plus * &x0)).ok_or(CbsError::Singular("M×"))?;
    let l_cross = a.view((36, 9), (27, 27)).into_owned();
    let n_cross = a.view((36, 36), (27, 27)).into_owned();
    let z0 = -n_cross.lu().solve(&(l_cross * &y0)).ok_or(CbsError::Singular("N×"))?;
    let s: Vec<_> = config.atoms.iter().map(atom::steady_bloch).collect();
    let mut y_dev = 0.0f64;
    let mut z_dev = 0.0f64;
    for (k, t) in layout_triples().iter().enumerate() {
        let prod = (0..3).filter(|&j| t[j] > 0).fold(C64::new(1.0, 0.0), |acc, j| acc * s[j][t[j] - 1]);
        if (9..36).contains(&k) {
            y_dev = y_dev.max((y0[k - 9] - prod).norm());
        } else if k >= 36 {
            z_dev = z_dev.max((z0[k - 36] - prod).norm());
        }
    }
    Ok(SumRuleReport { y_deviation: y_dev, z_deviation: z_dev })
}

/// Interaction labels and read-out of the scattering path behind a
/// contribution type, with atoms numbered along the chain.
pub fn contribution_path(ty: ContributionType) -> ([InteractionLabel; 4], IntensityKind) {
    use InteractionLabel as L;
    match ty {
        ContributionType::L1 => ([L::v_star(2, 1), L::v_star(3, 2), L::v(1, 2), L::v(2, 3)], IntensityKind::Background(3)),
        ContributionType::L2 => ([L::v_star(2, 1), L::v_star(2, 3), L::v(1, 2), L::v(3, 2)], IntensityKind::Background(2)),
        ContributionType::C1 => {
            ([L::v_star(2, 1), L::v_star(3, 2), L::v(2, 1), L::v(3, 2)], IntensityKind::Interference(1, 3))
        }
        ContributionType::C2 => {
            ([L::v_star(2, 1), L::v_star(3, 2), L::v(1, 2), L::v(3, 2)], IntensityKind::Interference(2, 3))
        }
    }
}

impl MasterOracle {
    /// Fourth-order intensity of the path behind a contribution type.
    pub fn path_intensity(&self, ty: ContributionType) -> Result<C64> {
        let (labels, kind) = contribution_path(ty);
        extract_intensity(&self.path_term(&labels)?, kind)
    }

    /// Elastic part of [`Self::path_intensity`]: the long-time limit of the
    /// detected correlation factorizes into ⟨σ_λ⁺⟩⟨σ_μ⁻⟩, so the path's
    /// labels are shared out between the two one-point functions in every way.
    pub fn path_elastic_intensity(&self, ty: ContributionType) -> Result<C64> {
        let (labels, kind) = contribution_path(ty);
        let (lambda, mu) = match kind {
            IntensityKind::Background(l) => (l, l),
            IntensityKind::Interference(l, m) => (l, m),
        };
        let n = labels.len();
        let mut total = C64::default();
        for mask in 0usize..(1 << n) {
            let pick = |bit: usize| -> Vec<InteractionLabel> {
                (0..n).filter(|j| mask >> j & 1 == bit).map(|j| labels[j]).collect()
            };
            let plus = self.label_term(&pick(1))?.bloch(lambda)[1];
            let minus = self.label_term(&pick(0))?.bloch(mu)[0];
            total += plus * minus;
        }
        Ok(total)
    }
}
