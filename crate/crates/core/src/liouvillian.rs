//! Generator of the reduced density-matrix dynamics.
//!
//! The density matrix is flattened into the ordered vector
//! `(ρ11, ρ22, ρ33, ρ12, ρ13, ρ23, ρ14, ρ24, ρ34, ρ21, ρ31, ρ32, ρ41, ρ42, ρ43)`
//! with the ground population eliminated through the trace condition. The
//! equation of motion is stored as
//!
//! ```text
//! dR/dt = M(t)·R − Σ(t),    M(t) = M0 + Ω1·M1·e^{−iφ} + Ω1·M−1·e^{+iφ},  φ = δt − Φ
//! ```
//!
//! so the pump-only steady state is `M0·R = Σ`. Only the nine equations for
//! the diagonal and upper-triangle elements are written out; the rows for
//! the lower triangle are their complex conjugates, generated by
//! [`Equation::conjugate`], which also swaps the `e^{∓iφ}` factors.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector};
use crate::params::{SystemKind, SystemParams};

/// Density-matrix element `ρ_{row,col}`, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Element {
    pub row: u8,
    pub col: u8,
}

pub const fn el(row: u8, col: u8) -> Element {
    Element { row, col }
}

impl Element {
    pub fn transpose(self) -> Element {
        el(self.col, self.row)
    }

    pub fn is_diagonal(self) -> bool {
        self.row == self.col
    }

    pub fn name(self) -> String {
        format!("rho{}{}", self.row, self.col)
    }
}

/// Ordering of the four-level state vector. Index `k` here is component `k + 1`.
pub const Y_BASIS: [Element; 15] = [
    el(1, 1), el(2, 2), el(3, 3), el(1, 2), el(1, 3), el(2, 3), el(1, 4), el(2, 4), el(3, 4),
    el(2, 1), el(3, 1), el(3, 2), el(4, 1), el(4, 2), el(4, 3),
];

/// Ordering of the three-level (V) state vector; `ρ33` is eliminated.
pub const V_BASIS: [Element; 8] = [
    el(1, 1), el(2, 2), el(1, 2), el(1, 3), el(2, 3), el(2, 1), el(3, 1), el(3, 2),
];

/// Time dependence of a term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Harmonic {
    Static,
    /// Multiplies `Ω1·e^{−i(δt−Φ)}`.
    Plus,
    /// Multiplies `Ω1·e^{+i(δt−Φ)}`.
    Minus,
}

impl Harmonic {
    fn conjugate(self) -> Harmonic {
        match self {
            Harmonic::Static => Harmonic::Static,
            Harmonic::Plus => Harmonic::Minus,
            Harmonic::Minus => Harmonic::Plus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Source {
    Rho(Element),
    One,
}

#[derive(Debug, Clone, Copy)]
struct Term {
    coeff: C64,
    harmonic: Harmonic,
    source: Source,
}

#[derive(Debug, Clone)]
struct Equation {
    target: Element,
    terms: Vec<Term>,
}

impl Equation {
    fn new(target: Element) -> Self {
        Equation { target, terms: Vec::new() }
    }

    fn term(mut self, coeff: C64, e: Element) -> Self {
        self.terms.push(Term { coeff, harmonic: Harmonic::Static, source: Source::Rho(e) });
        self
    }

    /// Probe term; the Ω1 factor is implied.
    fn probe(mut self, coeff: C64, harmonic: Harmonic, e: Element) -> Self {
        self.terms.push(Term { coeff, harmonic, source: Source::Rho(e) });
        self
    }

    fn conjugate(&self) -> Equation {
        Equation {
            target: self.target.transpose(),
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff.conj(),
                    harmonic: t.harmonic.conjugate(),
                    source: match t.source {
                        Source::Rho(e) => Source::Rho(e.transpose()),
                        Source::One => Source::One,
                    },
                })
                .collect(),
        }
    }

    /// Replace the eliminated population by `1 − Σ_k ρkk`.
    fn eliminate(&self, eliminated: u8, kept: &[u8]) -> Equation {
        let mut terms = Vec::with_capacity(self.terms.len() + kept.len());
        for t in &self.terms {
            match t.source {
                Source::Rho(e) if e == el(eliminated, eliminated) => {
                    terms.push(Term { source: Source::One, ..*t });
                    for &k in kept {
                        terms.push(Term { coeff: -t.coeff, source: Source::Rho(el(k, k)), ..*t });
                    }
                }
                _ => terms.push(*t),
            }
        }
        Equation { target: self.target, terms }
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn im(x: f64) -> C64 {
    C64::new(0.0, x)
}

/// The diagonal and upper-triangle equations of motion. For the V system
/// every Ω3, Δ3, γ3 term vanishes and no equation for a `ρi4` is produced.
fn primary_equations(p: &SystemParams) -> Vec<Equation> {
    use Harmonic::{Minus, Plus};
    let four = p.kind() == SystemKind::YFourLevel;
    let (g1, g2, g12) = (p.gamma1(), p.gamma2(), p.gamma12());
    let (w12, om2, d2) = (p.w12(), p.omega2(), p.delta2());
    let (g3, om3, d3) = if four { (p.gamma3(), p.omega3(), p.delta3()) } else { (0.0, 0.0, 0.0) };

    let mut eqs = vec![
        Equation::new(el(1, 1))
            .term(re(-2.0 * g1), el(1, 1))
            .term(re(-g12), el(1, 2))
            .term(re(-g12), el(2, 1))
            .probe(im(1.0), Plus, el(3, 1))
            .probe(im(-1.0), Minus, el(1, 3)),
        Equation::new(el(2, 2))
            .term(re(-2.0 * g2), el(2, 2))
            .term(re(-g12), el(1, 2))
            .term(re(-g12), el(2, 1))
            .term(im(om2), el(3, 2))
            .term(im(-om2), el(2, 3)),
        Equation::new(el(1, 2))
            .term(C64::new(-(g1 + g2), -w12), el(1, 2))
            .term(re(-g12), el(1, 1))
            .term(re(-g12), el(2, 2))
            .probe(im(1.0), Plus, el(3, 2))
            .term(im(-om2), el(1, 3)),
        Equation::new(el(1, 3))
            .term(C64::new(-(g1 + g3), -(w12 - d2)), el(1, 3))
            .term(re(-g12), el(2, 3))
            .probe(im(1.0), Plus, el(3, 3))
            .probe(im(-1.0), Plus, el(1, 1))
            .term(im(-om2), el(1, 2))
            .term(im(-om3), el(1, 4)),
        Equation::new(el(2, 3))
            .term(C64::new(-(g2 + g3), d2), el(2, 3))
            .term(re(-g12), el(1, 3))
            .probe(im(-1.0), Plus, el(2, 1))
            .term(im(om2), el(3, 3))
            .term(im(-om2), el(2, 2))
            .term(im(-om3), el(2, 4)),
    ];
    if four {
        eqs.extend([
            Equation::new(el(3, 3))
                .term(re(2.0 * g1), el(1, 1))
                .term(re(2.0 * g2), el(2, 2))
                .term(re(-2.0 * g3), el(3, 3))
                .term(re(2.0 * g12), el(1, 2))
                .term(re(2.0 * g12), el(2, 1))
                .probe(im(1.0), Minus, el(1, 3))
                .probe(im(-1.0), Plus, el(3, 1))
                .term(im(om2), el(2, 3))
                .term(im(-om2), el(3, 2))
                .term(im(om3), el(4, 3))
                .term(im(-om3), el(3, 4)),
            Equation::new(el(3, 4))
                .term(C64::new(-g3, d3), el(3, 4))
                .probe(im(1.0), Minus, el(1, 4))
                .term(im(om2), el(2, 4))
                .term(im(om3), el(4, 4))
                .term(im(-om3), el(3, 3)),
            Equation::new(el(1, 4))
                .term(C64::new(-g1, -(w12 - d2 - d3)), el(1, 4))
                .term(re(-g12), el(2, 4))
                .probe(im(1.0), Plus, el(3, 4))
                .term(im(-om3), el(1, 3)),
            Equation::new(el(2, 4))
                .term(C64::new(-g2, d2 + d3), el(2, 4))
                .term(re(-g12), el(1, 4))
                .term(im(om2), el(3, 4))
                .term(im(-om3), el(2, 3)),
        ]);
    }
    eqs
}

/// `M0`, `M1`, `M−1` and the inhomogeneous vectors for one parameter set.
///
/// `sigma_plus` and `sigma_minus` are the inhomogeneous parts multiplying
/// `Ω1·e^{∓iφ}`. They vanish for the four-level system and are non-zero for
/// the V system, where the eliminated population `ρ33` is driven by the probe.
#[derive(Debug, Clone, PartialEq)]
pub struct LiouvillianSet {
    pub kind: SystemKind,
    pub basis: &'static [Element],
    pub m0: ComplexMatrix,
    pub m1: ComplexMatrix,
    pub m_minus1: ComplexMatrix,
    pub sigma: ComplexVector,
    pub sigma_plus: ComplexVector,
    pub sigma_minus: ComplexVector,
}

fn assemble(p: &SystemParams, basis: &'static [Element], eliminated: u8) -> LiouvillianSet {
    let n = basis.len();
    let kept: Vec<u8> = (1..eliminated).collect();
    let index = |e: Element| basis.iter().position(|&b| b == e);

    let mut set = LiouvillianSet {
        kind: p.kind(),
        basis,
        m0: ComplexMatrix::zeros(n, n),
        m1: ComplexMatrix::zeros(n, n),
        m_minus1: ComplexMatrix::zeros(n, n),
        sigma: ComplexVector::zeros(n),
        sigma_plus: ComplexVector::zeros(n),
        sigma_minus: ComplexVector::zeros(n),
    };

    let mut rows = Vec::new();
    for eq in primary_equations(p) {
        if !eq.target.is_diagonal() {
            rows.push(eq.conjugate());
        }
        rows.push(eq);
    }

    for eq in rows {
        let Some(row) = index(eq.target) else { continue };
        for t in eq.eliminate(eliminated, &kept).terms {
            if t.coeff == C64::new(0.0, 0.0) {
                continue;
            }
            let (m, s) = match t.harmonic {
                Harmonic::Static => (&mut set.m0, &mut set.sigma),
                Harmonic::Plus => (&mut set.m1, &mut set.sigma_plus),
                Harmonic::Minus => (&mut set.m_minus1, &mut set.sigma_minus),
            };
            match t.source {
                // dR/dt = M·R − Σ, so a constant on the right-hand side enters Σ negated.
                Source::One => s[row] -= t.coeff,
                Source::Rho(e) => {
                    let col = index(e).unwrap_or_else(|| panic!("{} missing from basis", e.name()));
                    m[(row, col)] += t.coeff;
                }
            }
        }
    }
    set
}

/// Four-level generator (15 components).
pub fn build_liouvillian(p: &SystemParams) -> Result<LiouvillianSet> {
    if p.kind() != SystemKind::YFourLevel {
        return Err(Error::WrongSystemKind { expected: "Y_FOUR_LEVEL" });
    }
    Ok(assemble(p, &Y_BASIS, 4))
}

/// Three-level V generator (8 components), obtained by removing |4>.
pub fn build_v_liouvillian(p: &SystemParams) -> Result<LiouvillianSet> {
    if p.kind() != SystemKind::VThreeLevel {
        return Err(Error::WrongSystemKind { expected: "V_THREE_LEVEL" });
    }
    Ok(assemble(p, &V_BASIS, 3))
}

/// Builds whichever generator matches `p.kind()`.
pub fn build_for(p: &SystemParams) -> LiouvillianSet {
    match p.kind() {
        SystemKind::YFourLevel => assemble(p, &Y_BASIS, 4),
        SystemKind::VThreeLevel => assemble(p, &V_BASIS, 3),
    }
}

impl LiouvillianSet {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Number of atomic levels (4 or 3).
    pub fn levels(&self) -> usize {
        match self.kind {
            SystemKind::YFourLevel => 4,
            SystemKind::VThreeLevel => 3,
        }
    }

    /// 0-based position of an element in the state vector.
    pub fn index_of(&self, e: Element) -> Option<usize> {
        self.basis.iter().position(|&b| b == e)
    }

    /// Position of the probe coherence `ρ13`.
    pub fn probe_index(&self) -> usize {
        self.index_of(el(1, 3)).expect("ρ13 is always part of the basis")
    }

    /// `dR/dt = M(t)·R − Σ(t)` at probe phase `φ = δt − Φ`, written into `out`.
    pub fn derivative(&self, state: &[C64], omega1: f64, phase: f64, out: &mut [C64]) {
        let one = C64::new(1.0, 0.0);
        for (o, s) in out.iter_mut().zip(self.sigma.iter()) {
            *o = -s;
        }
        crate::linalg::matvec_acc(&self.m0, state, one, out);
        if omega1 != 0.0 {
            let plus = C64::from_polar(omega1, -phase);
            let minus = C64::from_polar(omega1, phase);
            crate::linalg::matvec_acc(&self.m1, state, plus, out);
            crate::linalg::matvec_acc(&self.m_minus1, state, minus, out);
            for i in 0..out.len() {
                out[i] -= plus * self.sigma_plus[i] + minus * self.sigma_minus[i];
            }
        }
    }

    /// Full density matrix, with the eliminated population restored.
    pub fn reconstruct(&self, v: &ComplexVector) -> Result<ComplexMatrix> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: v.len() });
        }
        let n = self.levels();
        let mut rho = ComplexMatrix::zeros(n, n);
        for (k, e) in self.basis.iter().enumerate() {
            rho[(e.row as usize - 1, e.col as usize - 1)] = v[k];
        }
        let pops: C64 = (0..n - 1).map(|k| rho[(k, k)]).sum();
        rho[(n - 1, n - 1)] = C64::new(1.0, 0.0) - pops;
        Ok(rho)
    }

    /// Largest `|ρji − conj(ρij)|` and largest `|Im ρkk|` of a state vector.
    pub fn hermiticity_defect(&self, v: &[C64]) -> f64 {
        let mut worst = 0.0f64;
        for (k, e) in self.basis.iter().enumerate() {
            if e.is_diagonal() {
                worst = worst.max(v[k].im.abs());
            } else if e.row < e.col {
                let t = self.index_of(e.transpose()).expect("basis holds conjugate pairs");
                worst = worst.max((v[t] - v[k].conj()).norm());
            }
        }
        worst
    }

    /// Serializable dump of all matrices for external diffing.
    pub fn dump(&self) -> LiouvillianDump {
        fn mat(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
            (0..m.rows()).map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect()).collect()
        }
        fn vec(v: &ComplexVector) -> Vec<[f64; 2]> {
            v.iter().map(|z| [z.re, z.im]).collect()
        }
        LiouvillianDump {
            system_kind: self.kind.name(),
            basis: self.basis.iter().map(|e| e.name()).collect(),
            m0: mat(&self.m0),
            m1: mat(&self.m1),
            m_minus1: mat(&self.m_minus1),
            sigma: vec(&self.sigma),
            sigma_plus: vec(&self.sigma_plus),
            sigma_minus: vec(&self.sigma_minus),
        }
    }
}

/// Row-major JSON image of a [`LiouvillianSet`], complex entries as `[re, im]`.
#[derive(Debug, Clone, Serialize)]
pub struct LiouvillianDump {
    pub system_kind: &'static str,
    pub basis: Vec<String>,
    pub m0: Vec<Vec<[f64; 2]>>,
    pub m1: Vec<Vec<[f64; 2]>>,
    pub m_minus1: Vec<Vec<[f64; 2]>>,
    pub sigma: Vec<[f64; 2]>,
    pub sigma_plus: Vec<[f64; 2]>,
    pub sigma_minus: Vec<[f64; 2]>,
}

/// The 15-component four-level state vector with 1-based component access.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector15(pub [C64; 15]);

impl StateVector15 {
    pub fn zeros() -> Self {
        StateVector15([C64::new(0.0, 0.0); 15])
    }

    /// Component `k` in 1-based numbering (5 is `ρ13`, 9 is `ρ34`).
    pub fn component(&self, k: usize) -> C64 {
        self.0[k - 1]
    }

    pub fn get(&self, e: Element) -> Option<C64> {
        Y_BASIS.iter().position(|&b| b == e).map(|k| self.0[k])
    }

    pub fn set(&mut self, e: Element, value: C64) {
        let k = Y_BASIS.iter().position(|&b| b == e).expect("element outside the four-level basis");
        self.0[k] = value;
    }

    /// Rebuild the 4×4 density matrix with `ρ44 = 1 − ρ11 − ρ22 − ρ33`.
    pub fn hermitian_reconstruct(&self) -> ComplexMatrix {
        let mut rho = ComplexMatrix::zeros(4, 4);
        for (k, e) in Y_BASIS.iter().enumerate() {
            rho[(e.row as usize - 1, e.col as usize - 1)] = self.0[k];
        }
        rho[(3, 3)] = C64::new(1.0, 0.0) - self.0[0] - self.0[1] - self.0[2];
        rho
    }
}

impl TryFrom<&ComplexVector> for StateVector15 {
    type Error = Error;
    fn try_from(v: &ComplexVector) -> Result<Self> {
        let arr: [C64; 15] = v
            .0
            .as_slice()
            .try_into()
            .map_err(|_| Error::DimensionMismatch { expected: 15, found: v.len() })?;
        Ok(StateVector15(arr))
    }
}

impl From<StateVector15> for ComplexVector {
    fn from(v: StateVector15) -> Self {
        ComplexVector(v.0.to_vec())
    }
}
