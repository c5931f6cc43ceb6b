//! Conservation laws, complex-balanced equilibria, and boundary equilibria.
//!
//! The conservation basis `Q` (rows spanning `ker W`) is computed exactly in
//! rational arithmetic. The strictly positive complex-balanced equilibrium of
//! a compatibility class is found by damped Gauss-Newton in `w = log u`, which
//! keeps every iterate in the open positive orthant; the residual stack is an
//! independent subset of the per-complex balance residuals plus the class
//! constraints `Q·u·|Ω| = M`. Boundary equilibria are enumerated by brute
//! force over proper supports.

mod kernel;

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::math;
use crate::network::{Complex, Rational, ReactionNetwork};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("Newton did not converge after {iterations} iterations (complex-balance residual {cb_residual:.3e}, class residual {class_residual:.3e})")]
    NonConvergence {
        iterations: usize,
        last_iterate: Vec<f64>,
        cb_residual: f64,
        class_residual: f64,
    },
    #[error("mass vector appears infeasible: class residual {class_residual:.3e} does not improve while the iterate diverges")]
    InfeasibleMass { class_residual: f64 },
    #[error("mass vector has {got} entries, compatibility class has dimension {expected}")]
    MassDimension { expected: usize, got: usize },
    #[error("support enumeration is limited to 16 species, network has {0}")]
    TooManySpecies(usize),
}

/// Rational matrix `Q` whose rows form a basis of `ker(W)`; `Q f(u) = 0`
/// exactly, so `Q ∫u` are the conserved masses.
#[derive(Debug, Clone)]
pub struct ConservationBasis {
    rows: Vec<Vec<Rational>>,
    rows_f64: Vec<Vec<f64>>,
    species: usize,
}

impl ConservationBasis {
    /// Number of independent conservation laws `m = I - rank(W)`.
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn species_count(&self) -> usize {
        self.species
    }

    pub fn rows_exact(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows_f64
    }

    /// `Q u · volume` for a spatially homogeneous state `u`.
    pub fn masses_of_state(&self, u: &[f64], volume: f64) -> Vec<f64> {
        self.rows_f64
            .iter()
            .map(|q| q.iter().zip(u).map(|(qi, ui)| qi * ui).sum::<f64>() * volume)
            .collect()
    }

    /// `Q v` for per-species integrals `v_i = ∫ u_i dx`.
    pub fn masses_of_integrals(&self, integrals: &[f64]) -> Vec<f64> {
        self.rows_f64
            .iter()
            .map(|q| q.iter().zip(integrals).map(|(qi, vi)| qi * vi).sum())
            .collect()
    }
}

/// Exact rational kernel basis of the Wegscheider matrix, rows normalised to
/// integer entries with content 1 and positive leading coefficient.
pub fn conservation_basis(net: &ReactionNetwork) -> ConservationBasis {
    let rows_w: Vec<Vec<Rational>> =
        (0..net.reaction_count()).map(|r| net.reaction_vector_exact(r)).collect();
    let rows = kernel::rational_kernel(&rows_w, net.species_count());
    let rows_f64 = rows
        .iter()
        .map(|r| r.iter().map(|x| x.to_f64().unwrap()).collect())
        .collect();
    ConservationBasis { rows, rows_f64, species: net.species_count() }
}

/// Distinct complexes with their outflow (`y_r = c`) and inflow (`y'_s = c`)
/// reaction indices.
struct ComplexTable {
    complexes: Vec<Complex>,
    outs: Vec<Vec<usize>>,
    ins: Vec<Vec<usize>>,
}

impl ComplexTable {
    fn build(net: &ReactionNetwork) -> Self {
        let complexes = net.distinct_complexes();
        let mut outs = vec![Vec::new(); complexes.len()];
        let mut ins = vec![Vec::new(); complexes.len()];
        for (r_idx, r) in net.reactions().iter().enumerate() {
            let o = complexes.binary_search(r.reactant()).unwrap();
            let i = complexes.binary_search(r.product()).unwrap();
            outs[o].push(r_idx);
            ins[i].push(r_idx);
        }
        Self { complexes, outs, ins }
    }

    /// Per-complex `(outflow, inflow)` at a non-negative state `v`.
    fn flows(&self, net: &ReactionNetwork, v: &[f64]) -> Vec<(f64, f64)> {
        self.complexes
            .iter()
            .enumerate()
            .map(|(c, _)| {
                let out: f64 = self.outs[c]
                    .iter()
                    .map(|&r| {
                        let re = &net.reactions()[r];
                        re.rate() * re.reactant().monomial(v)
                    })
                    .sum();
                let inflow: f64 = self.ins[c]
                    .iter()
                    .map(|&s| {
                        let re = &net.reactions()[s];
                        re.rate() * re.reactant().monomial(v)
                    })
                    .sum();
                (out, inflow)
            })
            .collect()
    }
}

/// Worst complex-balance defect `max_y |Σ_{r: y_r=y} k_r v^{y_r} - Σ_{s: y'_s=y} k_s v^{y_s}|`
/// over all distinct complexes `y`.
pub fn check_complex_balance(net: &ReactionNetwork, v: &[f64]) -> f64 {
    let table = ComplexTable::build(net);
    table
        .flows(net, v)
        .iter()
        .map(|(out, inflow)| (out - inflow).abs())
        .fold(0.0, f64::max)
}

/// The strictly positive complex-balanced state of one compatibility class,
/// with its residual certificates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Equilibrium {
    pub u_inf: Vec<f64>,
    pub mass: Vec<f64>,
    pub cb_residual: f64,
    pub class_residual: f64,
    pub iterations: usize,
}

/// Solve for the positive complex-balanced equilibrium in the class `Q·u·|Ω| = M`.
///
/// The caller certifies (or assumes) that the network is complex balanced;
/// `check_complex_balance` on any known positive equilibrium does that.
pub fn solve_equilibrium(
    net: &ReactionNetwork,
    basis: &ConservationBasis,
    mass: &[f64],
    volume: f64,
) -> Result<Equilibrium, SolveError> {
    let guess = initial_guess(basis, mass, volume, net.species_count());
    solve_equilibrium_from(net, basis, mass, volume, &guess)
}

/// [`solve_equilibrium`] from an explicit initial `w = log u` iterate.
pub fn solve_equilibrium_from(
    net: &ReactionNetwork,
    basis: &ConservationBasis,
    mass: &[f64],
    volume: f64,
    w0: &[f64],
) -> Result<Equilibrium, SolveError> {
    if mass.len() != basis.dim() {
        return Err(SolveError::MassDimension { expected: basis.dim(), got: mass.len() });
    }
    let species = net.species_count();
    let table = ComplexTable::build(net);
    let active: Vec<usize> = (0..species).collect();
    let mut sys = LogBalanceSystem {
        net,
        table,
        active,
        reaction_active: vec![true; net.reaction_count()],
        selected: Vec::new(),
        class_rows: basis.rows().to_vec(),
        mass: mass.to_vec(),
        volume,
    };
    sys.selected = sys.select_independent_complexes(w0);

    let opts = GnOptions { max_iter: 100, w_bound: 40.0, tol_rel: 1e-12 };
    let run = gauss_newton(&sys, w0, &opts);

    let u_inf: Vec<f64> = run.w.iter().map(|&w| math::exp(w)).collect();
    let cb_residual = check_complex_balance(net, &u_inf);
    let class_residual = class_residual(basis, &u_inf, mass, volume);
    let accepted = cb_residual <= 1e-10 * (1.0 + flow_scale(&sys, &u_inf))
        && class_residual <= 1e-10 * (1.0 + max_abs(mass));
    if accepted {
        return Ok(Equilibrium {
            u_inf,
            mass: mass.to_vec(),
            cb_residual,
            class_residual,
            iterations: run.iterations,
        });
    }
    match run.outcome {
        GnOutcome::Diverged if class_residual >= 0.5 * run.class_residual_start => {
            Err(SolveError::InfeasibleMass { class_residual })
        }
        _ => Err(SolveError::NonConvergence {
            iterations: run.iterations,
            last_iterate: u_inf,
            cb_residual,
            class_residual,
        }),
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

fn class_residual(basis: &ConservationBasis, u: &[f64], mass: &[f64], volume: f64) -> f64 {
    basis
        .masses_of_state(u, volume)
        .iter()
        .zip(mass)
        .map(|(got, want)| (got - want).abs())
        .fold(0.0, f64::max)
}

fn flow_scale(sys: &LogBalanceSystem<'_>, u: &[f64]) -> f64 {
    sys.table
        .flows(sys.net, u)
        .iter()
        .map(|(o, i)| o + i)
        .fold(0.0, f64::max)
}

/// Project the uniform vector onto the class (least squares in the scalar
/// multiplier), falling back to all-ones.
fn initial_guess(basis: &ConservationBasis, mass: &[f64], volume: f64, species: usize) -> Vec<f64> {
    let q_ones: Vec<f64> = basis.rows().iter().map(|q| q.iter().sum()).collect();
    let num: f64 = q_ones.iter().zip(mass).map(|(q, m)| q * m).sum();
    let den: f64 = q_ones.iter().map(|q| q * q).sum::<f64>() * volume;
    let c = if den > 0.0 { num / den } else { 1.0 };
    let w = if c > 0.0 && c.is_finite() { math::ln(c) } else { 0.0 };
    vec![w; species]
}

/// Complex-balance residuals (plus optional class rows) over `w = log u`,
/// restricted to an active support.
struct LogBalanceSystem<'a> {
    net: &'a ReactionNetwork,
    table: ComplexTable,
    /// Species indices carrying unknowns; the rest are pinned to `u = 0`.
    active: Vec<usize>,
    /// Reactions whose reactant support lies inside `active`.
    reaction_active: Vec<bool>,
    /// Complex rows used in the Newton residual stack.
    selected: Vec<usize>,
    class_rows: Vec<Vec<f64>>,
    mass: Vec<f64>,
    volume: f64,
}

impl LogBalanceSystem<'_> {
    fn unknowns(&self) -> usize {
        self.active.len()
    }

    fn state(&self, w: &[f64]) -> Vec<f64> {
        let mut u = vec![0.0; self.net.species_count()];
        for (slot, &i) in self.active.iter().enumerate() {
            u[i] = math::exp(w[slot]);
        }
        u
    }

    /// `exp(y·w)` of reaction `r`'s reactant complex.
    fn monomial_log(&self, r: usize, w: &[f64]) -> f64 {
        let y = self.net.reactions()[r].reactant().float_coeffs();
        let dot: f64 = self.active.iter().enumerate().map(|(slot, &i)| y[i] * w[slot]).sum();
        math::exp(dot)
    }

    /// Residuals of every distinct complex at `w` (inactive terms drop out).
    fn complex_residuals(&self, w: &[f64]) -> Vec<f64> {
        (0..self.table.complexes.len())
            .map(|c| {
                let mut g = 0.0;
                for &r in &self.table.outs[c] {
                    if self.reaction_active[r] {
                        g += self.net.reactions()[r].rate() * self.monomial_log(r, w);
                    }
                }
                for &s in &self.table.ins[c] {
                    if self.reaction_active[s] {
                        g -= self.net.reactions()[s].rate() * self.monomial_log(s, w);
                    }
                }
                g
            })
            .collect()
    }

    /// Largest total flow through any complex, for relative tolerances.
    fn flow_scale_log(&self, w: &[f64]) -> f64 {
        (0..self.table.complexes.len())
            .map(|c| {
                let mut total = 0.0;
                for &r in &self.table.outs[c] {
                    if self.reaction_active[r] {
                        total += self.net.reactions()[r].rate() * self.monomial_log(r, w);
                    }
                }
                for &s in &self.table.ins[c] {
                    if self.reaction_active[s] {
                        total += self.net.reactions()[s].rate() * self.monomial_log(s, w);
                    }
                }
                total
            })
            .fold(0.0, f64::max)
    }

    fn class_residuals(&self, w: &[f64]) -> Vec<f64> {
        let u = self.state(w);
        self.class_rows
            .iter()
            .zip(&self.mass)
            .map(|(q, m)| {
                q.iter().zip(&u).map(|(qi, ui)| qi * ui).sum::<f64>() * self.volume - m
            })
            .collect()
    }

    /// Stacked residual vector: selected complex rows then class rows.
    fn residual_stack(&self, w: &[f64]) -> DVector<f64> {
        let g = self.complex_residuals(w);
        let cls = self.class_residuals(w);
        let mut f = Vec::with_capacity(self.selected.len() + cls.len());
        f.extend(self.selected.iter().map(|&c| g[c]));
        f.extend(cls);
        DVector::from_vec(f)
    }

    fn jacobian_complex_row(&self, c: usize, w: &[f64], row: &mut [f64]) {
        row.fill(0.0);
        for &r in &self.table.outs[c] {
            if self.reaction_active[r] {
                let e = self.net.reactions()[r].rate() * self.monomial_log(r, w);
                let y = self.net.reactions()[r].reactant().float_coeffs();
                for (slot, &i) in self.active.iter().enumerate() {
                    row[slot] += e * y[i];
                }
            }
        }
        for &s in &self.table.ins[c] {
            if self.reaction_active[s] {
                let e = self.net.reactions()[s].rate() * self.monomial_log(s, w);
                let y = self.net.reactions()[s].reactant().float_coeffs();
                for (slot, &i) in self.active.iter().enumerate() {
                    row[slot] -= e * y[i];
                }
            }
        }
    }

    fn jacobian_stack(&self, w: &[f64]) -> DMatrix<f64> {
        let n = self.unknowns();
        let rows = self.selected.len() + self.class_rows.len();
        let mut jac = DMatrix::zeros(rows, n);
        let mut scratch = vec![0.0; n];
        for (out_row, &c) in self.selected.iter().enumerate() {
            self.jacobian_complex_row(c, w, &mut scratch);
            for (j, &v) in scratch.iter().enumerate() {
                jac[(out_row, j)] = v;
            }
        }
        for (l, q) in self.class_rows.iter().enumerate() {
            for (slot, &i) in self.active.iter().enumerate() {
                jac[(self.selected.len() + l, slot)] = q[i] * math::exp(w[slot]) * self.volume;
            }
        }
        jac
    }

    /// Drop linearly dependent complex-balance rows, judged at the initial
    /// iterate: a Gram-Schmidt QR pass over the complex block of the Jacobian
    /// keeps a row only if its component orthogonal to the rows already kept
    /// exceeds `1e-8` of its own norm.
    fn select_independent_complexes(&self, w0: &[f64]) -> Vec<usize> {
        let n = self.unknowns();
        let mut kept: Vec<Vec<f64>> = Vec::new();
        let mut selected = Vec::new();
        let mut row = vec![0.0; n];
        for c in 0..self.table.complexes.len() {
            self.jacobian_complex_row(c, w0, &mut row);
            let norm0 = norm(&row);
            if norm0 == 0.0 {
                continue;
            }
            let mut v = row.clone();
            for _ in 0..2 {
                for b in &kept {
                    let proj: f64 = v.iter().zip(b).map(|(a, bb)| a * bb).sum();
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi -= proj * bi;
                    }
                }
            }
            let rnorm = norm(&v);
            if rnorm > 1e-8 * norm0 {
                for vi in &mut v {
                    *vi /= rnorm;
                }
                kept.push(v);
                selected.push(c);
            }
        }
        selected
    }
}

fn norm(v: &[f64]) -> f64 {
    math::sqrt(v.iter().map(|x| x * x).sum())
}

struct GnOptions {
    max_iter: usize,
    w_bound: f64,
    tol_rel: f64,
}

#[derive(Debug, PartialEq, Eq, Clone, Copy)]
enum GnOutcome {
    Converged,
    NoProgress,
    Diverged,
    MaxIter,
}

struct GnRun {
    w: Vec<f64>,
    iterations: usize,
    outcome: GnOutcome,
    class_residual_start: f64,
}

/// Damped Gauss-Newton on the squared residual norm: SVD least-squares step,
/// Armijo backtracking with initial step 1, factor 1/2, at most 30 halvings.
fn gauss_newton(sys: &LogBalanceSystem<'_>, w0: &[f64], opts: &GnOptions) -> GnRun {
    let mut w = w0.to_vec();
    let class_residual_start = max_abs(&sys.class_residuals(&w)) + 1e-300;
    let mut iterations = 0;
    let mut outcome = GnOutcome::MaxIter;

    for _ in 0..opts.max_iter {
        let cb = max_abs(&sys.complex_residuals(&w));
        let cls = max_abs(&sys.class_residuals(&w));
        let cb_scale = 1.0 + sys.flow_scale_log(&w);
        let cls_scale = 1.0 + max_abs(&sys.mass);
        if cb <= opts.tol_rel * cb_scale && cls <= opts.tol_rel * cls_scale {
            outcome = GnOutcome::Converged;
            break;
        }
        if w.iter().any(|x| x.abs() > opts.w_bound) {
            outcome = GnOutcome::Diverged;
            break;
        }

        let f = sys.residual_stack(&w);
        let phi = f.norm_squared();
        let jac = sys.jacobian_stack(&w);
        let step = match jac.svd(true, true).solve(&(-&f), 1e-13) {
            Ok(s) => s,
            Err(_) => {
                outcome = GnOutcome::NoProgress;
                break;
            }
        };

        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=30 {
            let trial: Vec<f64> =
                w.iter().zip(step.iter()).map(|(wi, si)| wi + t * si).collect();
            let phi_t = sys.residual_stack(&trial).norm_squared();
            if phi_t <= (1.0 - 1e-4 * t) * phi {
                w = trial;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        iterations += 1;
        if !accepted {
            outcome = GnOutcome::NoProgress;
            break;
        }
    }

    GnRun { w, iterations, outcome, class_residual_start }
}

/// A complex-balanced point on the boundary of the positive orthant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryEquilibriumReport {
    /// Species indices with strictly positive concentration.
    pub support: Vec<usize>,
    /// Full-length state, zero exactly off the support.
    pub point: Vec<f64>,
    /// `Q·point` (unit volume), identifying the compatibility class it sits in.
    pub in_class_of: Option<Vec<f64>>,
}

/// Brute-force sweep over every proper support `S ⊊ {1..I}`: restrict the
/// network to `S` (species off `S` pinned to zero) and attempt a positive
/// complex-balanced solve on the face. The origin is reported iff the balance
/// conditions hold at zero. Requires `I ≤ 16`.
pub fn detect_boundary_equilibria(
    net: &ReactionNetwork,
) -> Result<Vec<BoundaryEquilibriumReport>, SolveError> {
    let species = net.species_count();
    if species > 16 {
        return Err(SolveError::TooManySpecies(species));
    }
    let basis = conservation_basis(net);
    let table = ComplexTable::build(net);
    let mut reports = Vec::new();

    // The origin: all flows are evaluated exactly (0^0 = 1 for the empty
    // complex), so balance either holds or visibly fails.
    let zeros = vec![0.0; species];
    let flows0 = table.flows(net, &zeros);
    let res0 = flows0.iter().map(|(o, i)| (o - i).abs()).fold(0.0, f64::max);
    let scale0 = flows0.iter().map(|(o, i)| o + i).fold(0.0, f64::max);
    if res0 <= 1e-10 * (1.0 + scale0) {
        reports.push(BoundaryEquilibriumReport {
            support: Vec::new(),
            point: zeros.clone(),
            in_class_of: Some(basis.masses_of_state(&zeros, 1.0)),
        });
    }

    let full: u32 = (1u32 << species) - 1;
    let mut masks: Vec<u32> = (1..full).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));

    for mask in masks {
        let active: Vec<usize> = (0..species).filter(|i| mask & (1 << i) != 0).collect();
        let reaction_active: Vec<bool> = net
            .reactions()
            .iter()
            .map(|r| r.reactant().support().all(|i| mask & (1 << i) != 0))
            .collect();

        let sys = LogBalanceSystem {
            net,
            table: ComplexTable::build(net),
            active: active.clone(),
            reaction_active: reaction_active.clone(),
            selected: (0..table.complexes.len()).collect(),
            class_rows: Vec::new(),
            mass: Vec::new(),
            volume: 1.0,
        };

        let point = if reaction_active.iter().all(|a| !a) {
            // No reaction fires anywhere on this face: every point of the
            // face satisfies the balance conditions identically.
            let mut p = vec![0.0; species];
            for &i in &active {
                p[i] = 1.0;
            }
            p
        } else {
            let w0 = vec![0.0; active.len()];
            let opts = GnOptions { max_iter: 80, w_bound: 20.0, tol_rel: 1e-12 };
            let run = gauss_newton(&sys, &w0, &opts);
            if run.outcome != GnOutcome::Converged {
                continue;
            }
            sys.state(&run.w)
        };

        let flows = table.flows(net, &point);
        let res = flows.iter().map(|(o, i)| (o - i).abs()).fold(0.0, f64::max);
        let scale = flows.iter().map(|(o, i)| o + i).fold(0.0, f64::max);
        if res <= 1e-10 * (1.0 + scale) {
            reports.push(BoundaryEquilibriumReport {
                support: active,
                point: point.clone(),
                in_class_of: Some(basis.masses_of_state(&point, 1.0)),
            });
        }
    }

    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn ratio(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn basis_of_reversible_pair() {
        let net = ReactionNetwork::parse("A <-> B, kf=1, kb=1").unwrap();
        let basis = conservation_basis(&net);
        assert_eq!(basis.dim(), 1);
        assert_eq!(basis.rows_exact()[0], vec![ratio(1), ratio(1)]);
    }

    #[test]
    fn basis_of_cycle() {
        let net = ReactionNetwork::parse("A -> B, k=1\nB -> C, k=1\nC -> A, k=1").unwrap();
        let basis = conservation_basis(&net);
        assert_eq!(basis.dim(), 1);
        assert_eq!(basis.rows_exact()[0], vec![ratio(1), ratio(1), ratio(1)]);
    }

    #[test]
    fn basis_of_binding_reaction_spans_expected_laws() {
        let net = ReactionNetwork::parse("A+B <-> C, kf=1, kb=1").unwrap();
        let basis = conservation_basis(&net);
        assert_eq!(basis.dim(), 2);
        // (1,0,1) and (0,1,1) must lie in the row span of Q.
        for target in [[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]] {
            let q = basis.rows();
            // Solve c0*q0 + c1*q1 = target by 2x2 normal equations.
            let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
            let (a11, a12, a22) = (dot(&q[0], &q[0]), dot(&q[0], &q[1]), dot(&q[1], &q[1]));
            let (b1, b2) = (dot(&q[0], &target), dot(&q[1], &target));
            let det = a11 * a22 - a12 * a12;
            let c0 = (b1 * a22 - b2 * a12) / det;
            let c1 = (a11 * b2 - a12 * b1) / det;
            for i in 0..3 {
                let got = c0 * q[0][i] + c1 * q[1][i];
                assert!((got - target[i]).abs() < 1e-12, "target {target:?} not in span");
            }
        }
    }

    #[test]
    fn exactness_q_annihilates_w() {
        for text in [
            "A <-> B, kf=2, kb=3",
            "A+B <-> C, kf=1, kb=1",
            "A -> B, k=1\nB -> C, k=1\nC -> A, k=1",
            "1.5A -> B, k=1\nB -> 1.5A, k=2",
        ] {
            let net = ReactionNetwork::parse(text).unwrap();
            let basis = conservation_basis(&net);
            for q in basis.rows_exact() {
                for r in 0..net.reaction_count() {
                    let w_row = net.reaction_vector_exact(r);
                    let dot = q
                        .iter()
                        .zip(&w_row)
                        .map(|(a, b)| a * b)
                        .fold(Rational::from_integer(0.into()), |acc, x| acc + x);
                    assert_eq!(dot, Rational::from_integer(0.into()), "network {text}");
                }
            }
        }
    }

    #[test]
    fn complex_balance_residuals() {
        let net = ReactionNetwork::parse("A <-> B, kf=1, kb=1").unwrap();
        assert_eq!(check_complex_balance(&net, &[1.0, 1.0]), 0.0);

        let cycle = ReactionNetwork::parse("A -> B, k=1\nB -> C, k=1\nC -> A, k=1").unwrap();
        for c in [0.3, 1.0, 2.5] {
            assert!(check_complex_balance(&cycle, &[c, c, c]).abs() < 1e-15);
        }

        let skew = ReactionNetwork::parse("A <-> B, kf=1, kb=2").unwrap();
        assert_eq!(check_complex_balance(&skew, &[1.0, 1.0]), 1.0);
    }

    #[test]
    fn equilibrium_symmetric_pair() {
        let net = ReactionNetwork::parse("A <-> B, kf=1, kb=1").unwrap();
        let basis = conservation_basis(&net);
        let eq = solve_equilibrium(&net, &basis, &[2.0], 1.0).unwrap();
        assert!((eq.u_inf[0] - 1.0).abs() < 1e-10);
        assert!((eq.u_inf[1] - 1.0).abs() < 1e-10);
        assert!(eq.cb_residual <= 1e-10);
        assert!(eq.class_residual <= 1e-10);
    }

    #[test]
    fn equilibrium_cycle() {
        let net = ReactionNetwork::parse("A -> B, k=1\nB -> C, k=1\nC -> A, k=1").unwrap();
        let basis = conservation_basis(&net);
        let eq = solve_equilibrium(&net, &basis, &[3.0], 1.0).unwrap();
        for u in &eq.u_inf {
            assert!((u - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn equilibrium_detailed_balance() {
        let net = ReactionNetwork::parse("A <-> B, kf=2, kb=1").unwrap();
        let basis = conservation_basis(&net);
        let eq = solve_equilibrium(&net, &basis, &[3.0], 1.0).unwrap();
        assert!((eq.u_inf[0] - 1.0).abs() < 1e-10, "{:?}", eq.u_inf);
        assert!((eq.u_inf[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn equilibrium_kills_rates() {
        let net = ReactionNetwork::parse("A+B <-> C, kf=2, kb=0.7").unwrap();
        let basis = conservation_basis(&net);
        let eq = solve_equilibrium(&net, &basis, &[1.5, 2.0], 1.0).unwrap();
        let f = net.mass_action_rates(&eq.u_inf);
        assert!(f.iter().all(|x| x.abs() <= 1e-10), "{f:?}");
    }

    #[test]
    fn infeasible_mass_detected() {
        let net = ReactionNetwork::parse("A <-> B, kf=1, kb=1").unwrap();
        let basis = conservation_basis(&net);
        let err = solve_equilibrium(&net, &basis, &[0.0], 1.0).unwrap_err();
        assert!(
            matches!(err, SolveError::InfeasibleMass { .. } | SolveError::NonConvergence { .. }),
            "{err}"
        );
    }

    #[test]
    fn mass_dimension_checked() {
        let net = ReactionNetwork::parse("A <-> B, kf=1, kb=1").unwrap();
        let basis = conservation_basis(&net);
        let err = solve_equilibrium(&net, &basis, &[1.0, 2.0], 1.0).unwrap_err();
        assert_eq!(err, SolveError::MassDimension { expected: 1, got: 2 });
    }

    #[test]
    fn boundary_reversible_pair_only_origin() {
        let net = ReactionNetwork::parse("A <-> B, kf=1, kb=1").unwrap();
        let reports = detect_boundary_equilibria(&net).unwrap();
        assert_eq!(reports.len(), 1);
        assert!(reports[0].support.is_empty());
        assert_eq!(reports[0].point, vec![0.0, 0.0]);
        assert_eq!(reports[0].in_class_of, Some(vec![0.0]));
    }

    #[test]
    fn boundary_cycle_only_origin() {
        let net = ReactionNetwork::parse("A -> B, k=1\nB -> C, k=1\nC -> A, k=1").unwrap();
        let reports = detect_boundary_equilibria(&net).unwrap();
        assert_eq!(reports.len(), 1);
        assert!(reports[0].support.is_empty());
    }

    #[test]
    fn boundary_binding_reaction_has_single_species_faces() {
        let net = ReactionNetwork::parse("A+B <-> C, kf=1, kb=1").unwrap();
        let reports = detect_boundary_equilibria(&net).unwrap();
        let supports: Vec<Vec<usize>> =
            reports.iter().map(|r| r.support.clone()).collect();
        assert!(supports.contains(&vec![]), "origin missing: {supports:?}");
        assert!(supports.contains(&vec![0]), "face {{A}} missing: {supports:?}");
        assert!(supports.contains(&vec![1]), "face {{B}} missing: {supports:?}");
        assert!(!supports.contains(&vec![2]), "face {{C}} is not an equilibrium");
        assert!(!supports.contains(&vec![0, 1]), "face {{A,B}} is not an equilibrium");
    }

    #[test]
    fn boundary_autocatalytic_example() {
        let net = ReactionNetwork::parse("A+B -> 2B, k=1\nB -> A, k=1").unwrap();
        let reports = detect_boundary_equilibria(&net).unwrap();
        let supports: Vec<Vec<usize>> =
            reports.iter().map(|r| r.support.clone()).collect();
        // (a, 0) faces are genuine equilibria (nothing reacts without B);
        // (0, b) cannot balance the complex B.
        assert!(supports.contains(&vec![]));
        assert!(supports.contains(&vec![0]), "{supports:?}");
        assert!(!supports.contains(&vec![1]), "{supports:?}");
    }

    #[test]
    fn inflow_network_has_no_origin_equilibrium() {
        let net = ReactionNetwork::parse("0 -> A, k=1\nA -> 0, k=1").unwrap();
        let reports = detect_boundary_equilibria(&net).unwrap();
        assert!(reports.is_empty(), "{reports:?}");
        // ... and its positive equilibrium is u = 1 in the empty class.
        let basis = conservation_basis(&net);
        assert_eq!(basis.dim(), 0);
        let eq = solve_equilibrium(&net, &basis, &[], 1.0).unwrap();
        assert!((eq.u_inf[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn species_guard() {
        let names: Vec<_> = (0..17).map(|i| alloc::format!("S{i}")).collect();
        let text: alloc::string::String = (0..16)
            .map(|i| alloc::format!("{} -> {}, k=1\n", names[i], names[i + 1]))
            .collect();
        let net = ReactionNetwork::parse(&text).unwrap();
        assert_eq!(net.species_count(), 17);
        assert_eq!(
            detect_boundary_equilibria(&net).unwrap_err().to_string(),
            SolveError::TooManySpecies(17).to_string()
        );
    }
}
