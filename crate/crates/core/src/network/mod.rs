//! Reaction networks: stoichiometry, mass-action rates, and the entropy
//! inequality they satisfy.
//!
//! A network is `I` named species reacting through `R` irreversible reactions
//! `y_r -> y'_r` with rate constants `k_r > 0`. Stoichiometric coefficients
//! live in `{0} ∪ [1, ∞)` and are kept as exact rationals so that the
//! conservation-law kernel downstream is exact; a cached `f64` view drives all
//! floating-point evaluation.

mod parse;

pub use parse::ParseError;

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::math;

/// Exact stoichiometric scalar.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NetworkError {
    #[error("coefficient {value} at species index {index} outside {{0}} ∪ [1,∞)")]
    InvalidCoefficient { index: usize, value: String },
    #[error("reaction rate must be positive and finite, got {0}")]
    NonPositiveRate(f64),
    #[error("reactant and product complexes coincide")]
    IdenticalComplexes,
    #[error("duplicate species `{0}`")]
    DuplicateSpecies(String),
    #[error("complex has {got} entries, network has {expected} species")]
    WrongComplexLength { expected: usize, got: usize },
    #[error("state has {got} entries, network has {expected} species")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state must be strictly positive componentwise")]
    NonPositiveState,
    #[error("diffusivity d[{0}] must be positive")]
    NonPositiveDiffusivity(usize),
    #[error("diffusion exponent m[{0}] must lie in (0, ∞)")]
    InvalidExponent(usize),
    #[error("{0}")]
    RegimeViolation(String),
    #[error("entropy vector has {got} entries, expected {expected}")]
    MuDimension { expected: usize, got: usize },
}

/// One side of a reaction: a formal combination `y_1 S_1 + … + y_I S_I`
/// with every `y_i` either `0` or at least `1`. The all-zero complex stands
/// for pure inflow/outflow reactions.
#[derive(Debug, Clone)]
pub struct Complex {
    coeffs: Vec<Rational>,
    floats: Vec<f64>,
}

impl Complex {
    pub fn new(coeffs: Vec<Rational>) -> Result<Self, NetworkError> {
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() && *c < Rational::one() || c.is_negative() {
                return Err(NetworkError::InvalidCoefficient {
                    index: i,
                    value: c.to_string(),
                });
            }
        }
        let floats = coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
        Ok(Self { coeffs, floats })
    }

    /// Convenience constructor from small integers.
    pub fn from_integers(coeffs: &[u32]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
            .expect("integer coefficients are always admissible")
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn float_coeffs(&self) -> &[f64] {
        &self.floats
    }

    /// Indices with a nonzero coefficient.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, _)| i)
    }

    /// `|y| = Σ_i y_i`, the total molecularity.
    pub fn weight(&self) -> f64 {
        self.floats.iter().sum()
    }

    /// Monomial `u^y = Π u_i^{y_i}` with `0^0 = 1`; negative entries of `u`
    /// are clamped to zero first.
    pub fn monomial(&self, u: &[f64]) -> f64 {
        let mut p = 1.0;
        for (i, &y) in self.floats.iter().enumerate() {
            if y != 0.0 {
                p *= math::pow_stoich(u[i].max(0.0), y);
            }
        }
        p
    }
}

impl PartialEq for Complex {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl Eq for Complex {}

impl PartialOrd for Complex {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Complex {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.coeffs.cmp(&other.coeffs)
    }
}

/// An irreversible reaction `reactant -> product` with rate constant `k > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reaction {
    reactant: Complex,
    product: Complex,
    rate: f64,
}

impl Reaction {
    pub fn new(reactant: Complex, product: Complex, rate: f64) -> Result<Self, NetworkError> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(NetworkError::NonPositiveRate(rate));
        }
        if reactant == product {
            return Err(NetworkError::IdenticalComplexes);
        }
        Ok(Self { reactant, product, rate })
    }

    pub fn reactant(&self) -> &Complex {
        &self.reactant
    }

    pub fn product(&self) -> &Complex {
        &self.product
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

/// Precomputed per-reaction data for fast rate evaluation.
#[derive(Debug, Clone)]
struct RateTerm {
    rate: f64,
    /// Nonzero reactant exponents `(i, y_{r,i})`.
    powers: Vec<(usize, f64)>,
    /// Nonzero net stoichiometry `(i, y'_{r,i} - y_{r,i})`.
    deltas: Vec<(usize, f64)>,
}

/// A named reaction network. Species are indexed by first appearance; all
/// complexes have length `I = species.len()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WireNetwork", into = "WireNetwork")]
pub struct ReactionNetwork {
    species: Vec<String>,
    reactions: Vec<Reaction>,
    terms: Vec<RateTerm>,
}

impl ReactionNetwork {
    pub fn new(species: Vec<String>, reactions: Vec<Reaction>) -> Result<Self, NetworkError> {
        for (i, name) in species.iter().enumerate() {
            if species[..i].contains(name) {
                return Err(NetworkError::DuplicateSpecies(name.clone()));
            }
        }
        for r in &reactions {
            for c in [r.reactant(), r.product()] {
                if c.len() != species.len() {
                    return Err(NetworkError::WrongComplexLength {
                        expected: species.len(),
                        got: c.len(),
                    });
                }
            }
        }
        let terms = reactions
            .iter()
            .map(|r| {
                let powers = r
                    .reactant
                    .floats
                    .iter()
                    .enumerate()
                    .filter(|(_, &y)| y != 0.0)
                    .map(|(i, &y)| (i, y))
                    .collect();
                let deltas = r
                    .product
                    .floats
                    .iter()
                    .zip(&r.reactant.floats)
                    .map(|(&yp, &y)| yp - y)
                    .enumerate()
                    .filter(|(_, d)| *d != 0.0)
                    .collect();
                RateTerm { rate: r.rate, powers, deltas }
            })
            .collect();
        Ok(Self { species, reactions, terms })
    }

    /// A network with species but no reactions (`f ≡ 0`); used for pure
    /// diffusion runs. Not producible by the parser, which rejects empty
    /// inputs.
    pub fn diffusion_only(species: Vec<String>) -> Result<Self, NetworkError> {
        Self::new(species, Vec::new())
    }

    /// Parse the one-reaction-per-line text format. See [`parse::ParseError`].
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        parse::parse_network(text)
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn species_count(&self) -> usize {
        self.species.len()
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn reaction_count(&self) -> usize {
        self.reactions.len()
    }

    /// The Wegscheider matrix `W ∈ R^{R×I}` with row `r = (y'_r - y_r)^T`.
    pub fn wegscheider_matrix(&self) -> DMatrix<f64> {
        let (r, i) = (self.reactions.len(), self.species.len());
        DMatrix::from_fn(r, i, |row, col| {
            self.reactions[row].product.floats[col] - self.reactions[row].reactant.floats[col]
        })
    }

    /// Row `r` of `W` in exact arithmetic.
    pub fn reaction_vector_exact(&self, r: usize) -> Vec<Rational> {
        let re = &self.reactions[r];
        re.product
            .coeffs
            .iter()
            .zip(&re.reactant.coeffs)
            .map(|(yp, y)| yp - y)
            .collect()
    }

    /// Mass-action reaction terms `f_i(u) = Σ_r k_r u^{y_r} (y'_{r,i} - y_{r,i})`
    /// with the convention `0^0 = 1`. Total on the non-negative orthant;
    /// negative inputs are clamped to zero first.
    pub fn mass_action_rates(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.species.len()];
        self.mass_action_rates_into(u, &mut out);
        out
    }

    /// Allocation-free variant of [`Self::mass_action_rates`].
    pub fn mass_action_rates_into(&self, u: &[f64], out: &mut [f64]) {
        debug_assert_eq!(u.len(), self.species.len());
        debug_assert_eq!(out.len(), self.species.len());
        out.fill(0.0);
        for term in &self.terms {
            let mut p = term.rate;
            for &(i, y) in &term.powers {
                p *= math::pow_stoich(u[i].max(0.0), y);
            }
            for &(i, d) in &term.deltas {
                out[i] += p * d;
            }
        }
    }

    /// Regularised rates `f_i(u) / (1 + ε Σ_j |f_j(u)|)`; `ε = 0` is exactly
    /// the plain mass-action vector.
    pub fn regularised_rates(&self, u: &[f64], eps: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.species.len()];
        self.regularised_rates_into(u, eps, &mut out);
        out
    }

    /// Allocation-free variant of [`Self::regularised_rates`].
    pub fn regularised_rates_into(&self, u: &[f64], eps: f64, out: &mut [f64]) {
        self.mass_action_rates_into(u, out);
        if eps > 0.0 {
            let total: f64 = out.iter().map(|f| f.abs()).sum();
            let denom = 1.0 + eps * total;
            for f in out.iter_mut() {
                *f /= denom;
            }
        }
    }

    /// Polynomial growth degree `μ = max_r {|y_r|, |y'_r|}` (at least 1).
    pub fn growth_exponent(&self) -> f64 {
        self.reactions
            .iter()
            .flat_map(|r| [r.reactant.weight(), r.product.weight()])
            .fold(1.0, f64::max)
    }

    /// Distinct complexes appearing as a reactant or product, in sorted order.
    pub fn distinct_complexes(&self) -> Vec<Complex> {
        let mut all: Vec<Complex> = Vec::new();
        for r in &self.reactions {
            for c in [&r.reactant, &r.product] {
                if !all.contains(c) {
                    all.push(c.clone());
                }
            }
        }
        all.sort();
        all
    }
}

/// Where the entropy vector `μ` came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MuSource {
    UserSupplied,
    FromEquilibrium,
}

/// The vector `μ` of the entropy inequality
/// `Σ_i f_i(u)(log u_i + μ_i) ≤ C Σ_i (1 + u_i log u_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropySpec {
    pub mu: Vec<f64>,
    pub source: MuSource,
}

impl EntropySpec {
    pub fn user_supplied(mu: Vec<f64>) -> Self {
        Self { mu, source: MuSource::UserSupplied }
    }

    /// `μ_i = -log u_{i,∞}` for a strictly positive complex-balanced state.
    pub fn from_equilibrium(u_inf: &[f64]) -> Result<Self, NetworkError> {
        if u_inf.iter().any(|&u| !(u > 0.0)) {
            return Err(NetworkError::NonPositiveState);
        }
        Ok(Self {
            mu: u_inf.iter().map(|&u| -math::ln(u)).collect(),
            source: MuSource::FromEquilibrium,
        })
    }
}

/// `Σ_i f_i(u)(log u_i + μ_i)` for strictly positive `u`.
///
/// With `μ` taken from a complex-balanced equilibrium this equals
/// `-Σ_r k_r u_∞^{y_r} Ψ(u^{y_r}/u_∞^{y_r}; u^{y'_r}/u_∞^{y'_r})` and is ≤ 0.
pub fn entropy_inequality_residual(
    net: &ReactionNetwork,
    spec: &EntropySpec,
    u: &[f64],
) -> Result<f64, NetworkError> {
    if u.len() != net.species_count() {
        return Err(NetworkError::DimensionMismatch {
            expected: net.species_count(),
            got: u.len(),
        });
    }
    if spec.mu.len() != net.species_count() {
        return Err(NetworkError::MuDimension {
            expected: net.species_count(),
            got: spec.mu.len(),
        });
    }
    if u.iter().any(|&x| !(x > 0.0)) {
        return Err(NetworkError::NonPositiveState);
    }
    let f = net.mass_action_rates(u);
    Ok(f.iter()
        .zip(u)
        .zip(&spec.mu)
        .map(|((fi, &ui), mu)| fi * (math::ln(ui) + mu))
        .sum())
}

/// Existence / convergence regime for the diffusion exponents (Table-1 rows).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// Renormalised solutions: requires `m_i < 2` for all `i`.
    Renormalised,
    /// Weak solutions: requires `m_i ≥ max(μ-1, 1)` for all `i`.
    Weak,
    /// Bounded solutions (d ≤ 2 branch): requires `min_i m_i > max(μ-1, 1)`.
    Bounded,
}

/// Diffusivities and nonlinear diffusion exponents, `∂_t u_i = d_i Δ u_i^{m_i} + f_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffusionSpec {
    pub d: Vec<f64>,
    pub m: Vec<f64>,
    pub regime: Regime,
}

impl DiffusionSpec {
    pub fn new(d: Vec<f64>, m: Vec<f64>, regime: Regime) -> Result<Self, NetworkError> {
        for (i, &di) in d.iter().enumerate() {
            if !(di > 0.0) || !di.is_finite() {
                return Err(NetworkError::NonPositiveDiffusivity(i));
            }
        }
        for (i, &mi) in m.iter().enumerate() {
            if !(mi > 0.0) || !mi.is_finite() {
                return Err(NetworkError::InvalidExponent(i));
            }
        }
        Ok(Self { d, m, regime })
    }

    /// Check the regime tag against the network's growth degree `μ`.
    pub fn validate(&self, net: &ReactionNetwork) -> Result<(), NetworkError> {
        if self.d.len() != net.species_count() || self.m.len() != net.species_count() {
            return Err(NetworkError::DimensionMismatch {
                expected: net.species_count(),
                got: self.d.len().min(self.m.len()),
            });
        }
        let mu = net.growth_exponent();
        let bound = (mu - 1.0).max(1.0);
        match self.regime {
            Regime::Renormalised => {
                if let Some(i) = self.m.iter().position(|&m| m >= 2.0) {
                    return Err(NetworkError::RegimeViolation(alloc::format!(
                        "renormalised regime requires m_i < 2 for all i, but m[{i}] = {}",
                        self.m[i]
                    )));
                }
            }
            Regime::Weak => {
                if let Some(i) = self.m.iter().position(|&m| m < bound) {
                    return Err(NetworkError::RegimeViolation(alloc::format!(
                        "weak regime requires m_i ≥ max(μ-1, 1) = {bound}, but m[{i}] = {}",
                        self.m[i]
                    )));
                }
            }
            Regime::Bounded => {
                let min = self.m.iter().cloned().fold(f64::INFINITY, f64::min);
                if !(min > bound) {
                    return Err(NetworkError::RegimeViolation(alloc::format!(
                        "bounded regime requires min_i m_i > max(μ-1, 1) = {bound}, got {min}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// JSON wire format: `{species:[…], reactions:[{y:[…], yp:[…], k:…}]}`.
#[derive(Serialize, Deserialize, Clone)]
struct WireReaction {
    y: Vec<f64>,
    yp: Vec<f64>,
    k: f64,
}

#[derive(Serialize, Deserialize, Clone)]
struct WireNetwork {
    species: Vec<String>,
    reactions: Vec<WireReaction>,
}

impl From<ReactionNetwork> for WireNetwork {
    fn from(net: ReactionNetwork) -> Self {
        let reactions = net
            .reactions
            .iter()
            .map(|r| WireReaction {
                y: r.reactant.floats.clone(),
                yp: r.product.floats.clone(),
                k: r.rate,
            })
            .collect();
        WireNetwork { species: net.species, reactions }
    }
}

impl TryFrom<WireNetwork> for ReactionNetwork {
    type Error = NetworkError;

    fn try_from(wire: WireNetwork) -> Result<Self, NetworkError> {
        let complex = |v: &[f64]| -> Result<Complex, NetworkError> {
            // Every finite f64 is a dyadic rational, so this stays exact.
            let coeffs = v
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    Rational::from_float(x).ok_or(NetworkError::InvalidCoefficient {
                        index: i,
                        value: alloc::format!("{x}"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Complex::new(coeffs)
        };
        let reactions = wire
            .reactions
            .iter()
            .map(|r| Reaction::new(complex(&r.y)?, complex(&r.yp)?, r.k))
            .collect::<Result<Vec<_>, _>>()?;
        ReactionNetwork::new(wire.species, reactions)
    }
}
