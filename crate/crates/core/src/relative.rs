//! Relative chains over the base line `F_{p^k}[t]`.
//!
//! The n-th chain member lives over `A^{1/p^{ne}}`. All levels share one
//! ring `F_{p^k}[x, s]` with `s = t^{1/p^N}`, so extending an ideal from
//! level `n` to level `m` keeps its generators unchanged and comparisons
//! between levels are plain ideal comparisons in that ring.

use std::sync::Arc;

use rayon::prelude::*;

use crate::absolute::{jacobian_minors, sigma_absolute, tau_absolute};
use crate::error::{Error, Result};
use crate::field::{checked_pow, FieldElement};
use crate::frobenius::{canonical_multiplier, partial_root, CartierMap, RootMode};
use crate::ideal::Ideal;
use crate::monomial::Monomial;
use crate::poly::{PolyRing, Polynomial};

/// Largest base field enumerated by fiber scans.
pub const FIBER_SCAN_CAP: u64 = 49;

/// Default number of chain levels.
pub const DEFAULT_N_MAX: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChainMode {
    Sigma,
    Tau,
    /// σ-chain for the canonical-module map `f^{p^e-1}·twist`.
    OmegaSigma,
    /// τ-chain for the canonical-module map `f^{p^e-1}·twist`.
    OmegaTau,
}

impl ChainMode {
    pub fn is_tau(self) -> bool {
        matches!(self, ChainMode::Tau | ChainMode::OmegaTau)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Multiplier {
    /// `(f_1 ⋯ f_c)^{p^e - 1}`.
    Canonical,
    Explicit(Polynomial),
}

/// A family `S/I → Spec F_{p^k}[t]` with a relative Cartier map.
#[derive(Clone, Debug)]
pub struct FamilySpec {
    map: CartierMap,
    twist: Polynomial,
    seed: Option<Ideal>,
    mode: ChainMode,
}

/// Quotient `u / F^{p^e-1}` with `F` the product of the relations, after
/// reducing `u` modulo `I^{[p^e]}` if needed.
fn twist_of(relations: &Ideal, e: u32, u: &Polynomial) -> Result<Polynomial> {
    let ring = relations.ring();
    let canonical = canonical_multiplier(relations, e)?;
    if let Some(g) = ring.div_exact(u, &canonical) {
        return Ok(g);
    }
    let q = checked_pow(ring.characteristic(), e).ok_or_else(|| Error::ExponentOverflow(format!("p^{e}")))?;
    let reduced = crate::frobenius::bracket_power(relations, q, RootMode::Absolute)?.normal_form(u);
    if reduced.is_zero() {
        return Ok(Polynomial::zero());
    }
    ring.div_exact(&reduced, &canonical).ok_or_else(|| {
        Error::precondition("multiplier is not a multiple of the canonical one; supply a seed explicitly")
    })
}

impl FamilySpec {
    pub fn new(
        relations: &Ideal,
        e: u32,
        multiplier: Multiplier,
        seed: Option<Ideal>,
        mode: ChainMode,
    ) -> Result<Self> {
        let ring = relations.ring();
        if !ring.has_base() {
            return Err(Error::precondition("a family needs the base variable t"));
        }
        let canonical = canonical_multiplier(relations, e)?;
        let (u, twist) = match (mode, multiplier) {
            (ChainMode::OmegaSigma | ChainMode::OmegaTau, Multiplier::Canonical) => (canonical, ring.one()),
            (ChainMode::OmegaSigma | ChainMode::OmegaTau, Multiplier::Explicit(g)) => {
                if relations.generators().len() > 1 {
                    return Err(Error::precondition("canonical-module chains need principal relations"));
                }
                (ring.mul(&canonical, &g), g)
            }
            (_, Multiplier::Canonical) => (canonical, ring.one()),
            (_, Multiplier::Explicit(u)) => {
                let twist = twist_of(relations, e, &u).unwrap_or_else(|_| u.clone());
                (u, twist)
            }
        };
        if let Some(b) = ring.base_index() {
            let scale = ring.base_scale();
            if u.terms().iter().any(|(m, _)| m.exponents()[b] % scale != 0) {
                return Err(Error::precondition("multiplier must be a polynomial in x and t"));
            }
        }
        let map = CartierMap::new(relations, e, u, RootMode::Relative)?;
        Ok(FamilySpec { map, twist, seed, mode })
    }

    pub fn map(&self) -> &CartierMap {
        &self.map
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        self.map.ring()
    }

    pub fn relations(&self) -> &Ideal {
        self.map.relations()
    }

    pub fn mode(&self) -> ChainMode {
        self.mode
    }

    pub fn seed(&self) -> Option<&Ideal> {
        self.seed.as_ref()
    }

    /// The multiplier divided by the canonical one.
    pub fn twist(&self) -> &Polynomial {
        &self.twist
    }

    /// The same family with another chain mode.
    pub fn with_mode(&self, mode: ChainMode) -> Result<FamilySpec> {
        let multiplier = match mode {
            ChainMode::OmegaSigma | ChainMode::OmegaTau => Multiplier::Explicit(self.twist.clone()),
            _ => Multiplier::Explicit(self.map.multiplier().clone()),
        };
        FamilySpec::new(self.relations(), self.map.e(), multiplier, self.seed.clone(), mode)
    }

    /// The seed of a τ-chain: the given one, or [`relative_test_seed`].
    pub fn effective_seed(&self) -> Result<Ideal> {
        match &self.seed {
            Some(s) => Ok(s.clone()),
            None => relative_test_seed(self, 1),
        }
    }

    fn check_depth(&self, n_max: u32) -> Result<()> {
        let depth = self.ring().depth().unwrap_or(0);
        let need = self.map.e() * n_max;
        if need > depth {
            return Err(Error::DepthExhausted(format!(
                "{n_max} levels of step {} need depth {need}, ring has {depth}",
                self.map.e()
            )));
        }
        Ok(())
    }
}

/// A base point: a value of `t` in `F_{p^k}`, or the generic point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FiberPoint {
    Value(FieldElement),
    Generic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabilizationKind {
    Global,
    Generic,
    NoneWithinCap,
}

#[derive(Clone, Debug)]
pub struct Stabilization {
    pub index: Option<u32>,
    pub kind: StabilizationKind,
    /// `h(s)` such that the chain is constant from `index` on over `D(h)`;
    /// `1` for global stabilization.
    pub witness: Option<Polynomial>,
}

#[derive(Clone, Debug)]
pub struct ChainReport {
    pub mode: ChainMode,
    /// `(n, a_n)` or `(n, b_n)` for `n = 1..=n_max`.
    pub levels: Vec<(u32, Ideal)>,
    pub stabilization: Stabilization,
    pub fiber_results: Vec<(FiberPoint, Ideal)>,
    pub restriction_n: Option<u32>,
}

/// `a_n = φ^n(R^{1/p^{ne}})` for `n = 1..=n_max`, each computed directly
/// from the composite multiplier.
pub fn sigma_chain(spec: &FamilySpec, n_max: u32) -> Result<ChainReport> {
    spec.check_depth(n_max)?;
    let unit = Ideal::unit(spec.ring().clone());
    let mut levels: Vec<(u32, Ideal)> = Vec::new();
    for n in 1..=n_max {
        let a = spec.map.image_ideal(&unit, n)?.reduced();
        if let Some((_, prev)) = levels.last() {
            if !prev.contains(&a) {
                return Err(Error::InvariantViolated(format!("a_{} does not contain a_{n}", n - 1)));
            }
        }
        levels.push((n, a));
    }
    finish_report(spec.mode, levels)
}

/// `b_n = seed + Σ_{i=1..n} φ^i(seed^{1/p^{ie}})` for `n = 1..=n_max`.
pub fn tau_chain(spec: &FamilySpec, n_max: u32) -> Result<ChainReport> {
    spec.check_depth(n_max)?;
    let seed = spec.effective_seed()?.sum(spec.relations())?.reduced();
    if seed == spec.relations().reduced() {
        return Err(Error::precondition("seed vanishes modulo the relations"));
    }
    let mut levels: Vec<(u32, Ideal)> = Vec::new();
    let mut acc = seed.clone();
    for n in 1..=n_max {
        let next = acc.sum(&spec.map.image_ideal(&seed, n)?)?.reduced();
        if !next.contains(&acc) {
            return Err(Error::InvariantViolated(format!("b_{} is not contained in b_{n}", n - 1)));
        }
        acc = next;
        levels.push((n, acc.clone()));
    }
    finish_report(spec.mode, levels)
}

/// The chain selected by the family's mode.
pub fn chain(spec: &FamilySpec, n_max: u32) -> Result<ChainReport> {
    if spec.mode.is_tau() {
        tau_chain(spec, n_max)
    } else {
        sigma_chain(spec, n_max)
    }
}

fn finish_report(mode: ChainMode, levels: Vec<(u32, Ideal)>) -> Result<ChainReport> {
    let stabilization = detect_stabilization(&levels)?;
    Ok(ChainReport {
        mode,
        levels,
        stabilization,
        fiber_results: Vec::new(),
        restriction_n: None,
    })
}

/// Least `n` from which the chain is constant: globally if possible,
/// otherwise over the complement of a base polynomial.
pub fn detect_stabilization(levels: &[(u32, Ideal)]) -> Result<Stabilization> {
    let none = Stabilization {
        index: None,
        kind: StabilizationKind::NoneWithinCap,
        witness: None,
    };
    if levels.len() < 2 {
        return Ok(none);
    }
    for i in 0..levels.len() - 1 {
        if levels[i + 1..].iter().all(|(_, a)| *a == levels[i].1) {
            let ring = levels[i].1.ring();
            return Ok(Stabilization {
                index: Some(levels[i].0),
                kind: StabilizationKind::Global,
                witness: Some(ring.one()),
            });
        }
    }
    if !levels[0].1.ring().has_base() {
        return Ok(none);
    }
    'outer: for i in 0..levels.len() - 1 {
        let ring = levels[i].1.ring();
        let mut witness = ring.one();
        for (_, later) in &levels[i + 1..] {
            match levels[i].1.generically_equal(later)? {
                (true, Some(h)) => witness = ring.monic(&ring.mul(&witness, &h)),
                _ => continue 'outer,
            }
        }
        return Ok(Stabilization {
            index: Some(levels[i].0),
            kind: StabilizationKind::Generic,
            witness: Some(witness),
        });
    }
    Ok(none)
}

/// Smallest power of `t` in an ideal, in steps of `t^{1/p^j}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TPower {
    /// `d` with `t^{d/p^j}` the least power; the count of level-`j` units.
    pub units: u64,
    /// `p`-exponent `j` of the step.
    pub level: u32,
    /// The exponent `d/p^j` as a fraction in lowest terms.
    pub numerator: u64,
    pub denominator: u64,
}

/// Least `c ∈ p^{-j}·Z≥0` with `t^c ∈ I`, or `None` when no power of `t`
/// lies in `I`. The contraction `I ∩ F_{p^k}[s] = ⟨h⟩` decides it: a power
/// of `s` lies in `I` exactly when `h` is a monomial.
pub fn min_t_power(ideal: &Ideal, level: u32) -> Result<Option<TPower>> {
    let ring = ideal.ring();
    let step = ring.level_step(level)?;
    let b = ring.base_index().expect("level_step checked the base");
    let h = ideal.base_generator()?;
    if h.is_zero() || h.len() != 1 {
        return Ok(None);
    }
    let d = h.terms()[0].0.exponents()[b];
    let units = d.div_ceil(step);
    let p = ring.characteristic();
    let mut num = units;
    let mut den = checked_pow(p, level).expect("level within depth");
    while den > 1 && num % p == 0 {
        num /= p;
        den /= p;
    }
    Ok(Some(TPower {
        units,
        level,
        numerator: num,
        denominator: den,
    }))
}

/// The Jacobian of the relations in the fiber variables only (maximal
/// minors), plus the relations, raised to `power`; intersected with the
/// twist of the multiplier when that is not a unit.
pub fn relative_test_seed(spec: &FamilySpec, power: u32) -> Result<Ideal> {
    let relations = spec.relations();
    let ring = relations.ring();
    let mut seed = if relations.is_zero() {
        Ideal::unit(ring.clone())
    } else {
        let columns = (0..ring.num_fiber_vars())
            .map(|v| {
                relations
                    .generators()
                    .iter()
                    .map(|g| ring.partial_derivative(g, v))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let jac = jacobian_minors(relations, &columns).sum(relations)?.reduced();
        if jac == relations.reduced() {
            return Err(Error::precondition(
                "relative Jacobian vanishes modulo the relations (non-reduced fibers)",
            ));
        }
        jac
    };
    if power != 1 {
        seed = seed.power(power).sum(relations)?;
    }
    let twist = spec.twist();
    if !twist.is_zero() && !twist.is_constant() {
        seed = seed.intersection(&Ideal::principal(ring.clone(), twist.clone()))?;
    }
    seed.sum(relations).map(|s| s.reduced())
}

/// `F_{p^k}[x]` with the fiber variables of `ring`.
pub fn fiber_ring(ring: &PolyRing) -> Result<Arc<PolyRing>> {
    PolyRing::new(ring.field().clone(), ring.var_names().to_vec(), None)
}

fn fiber_images(ring: &PolyRing, target: &PolyRing, lambda: FieldElement) -> Vec<Polynomial> {
    let mut images: Vec<Polynomial> = (0..ring.num_fiber_vars()).map(|i| target.var(i)).collect();
    let depth = ring.depth().unwrap_or(0);
    images.push(target.constant(ring.field().frobenius_inverse(lambda, depth)));
    images
}

/// `I|_λ`: substitute `s ↦ λ^{1/p^N}`. At the generic point the ideal is
/// returned unchanged; compare there with [`Ideal::generically_equal`].
pub fn restrict_fiber(ideal: &Ideal, at: FiberPoint) -> Result<Ideal> {
    let ring = ideal.ring();
    let FiberPoint::Value(lambda) = at else {
        return Ok(ideal.clone());
    };
    if !ring.has_base() {
        return Err(Error::precondition("restriction needs a base variable"));
    }
    let target = fiber_ring(ring)?;
    restrict_into(ideal, &target, lambda)
}

fn restrict_into(ideal: &Ideal, target: &Arc<PolyRing>, lambda: FieldElement) -> Result<Ideal> {
    let ring = ideal.ring();
    let images = fiber_images(ring, target, lambda);
    let gens = ideal
        .generators()
        .iter()
        .map(|g| ring.eval_hom(g, target, &images))
        .collect::<Result<Vec<_>>>()?;
    Ok(Ideal::new(target.clone(), gens))
}

/// The fiber map `ψ_λ` on `F_{p^k}[x]/I|_λ` with multiplier `u|_λ`.
pub fn restrict_map(map: &CartierMap, lambda: FieldElement) -> Result<CartierMap> {
    let ring = map.ring();
    let target = fiber_ring(ring)?;
    let relations = restrict_into(map.relations(), &target, lambda)?;
    let u = ring.eval_hom(map.multiplier(), &target, &fiber_images(ring, &target, lambda))?;
    CartierMap::new(&relations, map.e(), u, RootMode::Absolute)
}

/// Per-fiber outcome of a restriction scan.
#[derive(Clone, Debug)]
pub struct FiberResult {
    pub lambda: FieldElement,
    /// σ or τ of the fiber, computed on the fiber.
    pub fiber_ideal: Ideal,
    /// HSL number of the fiber's σ-chain.
    pub hsl: usize,
    /// Least `n` with `chain_m|_λ = fiber_ideal` for all `n ≤ m ≤ n_max`.
    pub n_lambda: Option<u32>,
}

#[derive(Clone, Debug)]
pub struct RestrictionReport {
    pub chain: ChainReport,
    pub fibers: Vec<FiberResult>,
    /// Maximum of the `n_lambda`, if all are finite.
    pub restriction_n: Option<u32>,
}

fn enumerate_base(ring: &PolyRing) -> Result<Vec<FieldElement>> {
    let order = ring.field().order();
    if order > FIBER_SCAN_CAP {
        return Err(Error::precondition(format!(
            "fiber scans enumerate at most {FIBER_SCAN_CAP} points; the field has {order}"
        )));
    }
    Ok(ring.field().elements().collect())
}

fn fiber_tau(map: &CartierMap, seed: &Ideal) -> Result<Ideal> {
    let seed_total = seed.sum(map.relations())?;
    if map.relations().contains(&seed_total) {
        // Σ ψ^i(0) = 0
        return Ok(map.relations().reduced());
    }
    tau_absolute(map, &seed_total)
}

fn scan_fiber(spec: &FamilySpec, report: &ChainReport, seed: Option<&Ideal>, lambda: FieldElement) -> Result<FiberResult> {
    let map = restrict_map(&spec.map, lambda)?;
    let sigma = sigma_absolute(&map)?;
    let fiber_ideal = match seed {
        Some(s) => fiber_tau(&map, &restrict_fiber(s, FiberPoint::Value(lambda))?)?,
        None => sigma.sigma.clone(),
    };
    let restricted = report
        .levels
        .iter()
        .map(|(n, a)| Ok((*n, restrict_fiber(a, FiberPoint::Value(lambda))?.reduced())))
        .collect::<Result<Vec<_>>>()?;
    let mut n_lambda = None;
    for (n, a) in restricted.iter().rev() {
        if *a != fiber_ideal {
            break;
        }
        n_lambda = Some(*n);
    }
    Ok(FiberResult {
        lambda,
        fiber_ideal,
        hsl: sigma.hsl,
        n_lambda,
    })
}

/// Compare the chain restricted to every `λ ∈ F_{p^k}` with σ (or τ, with
/// the restricted seed) of the fiber. Fibers are scanned in parallel; the
/// result keeps the encoding order of `λ`.
pub fn verify_restriction_theorem(spec: &FamilySpec, n_max: u32) -> Result<RestrictionReport> {
    let points = enumerate_base(spec.ring())?;
    let mut report = chain(spec, n_max)?;
    let seed = if spec.mode.is_tau() { Some(spec.effective_seed()?) } else { None };
    let fibers = points
        .par_iter()
        .map(|&lambda| scan_fiber(spec, &report, seed.as_ref(), lambda))
        .collect::<Result<Vec<_>>>()?;
    let restriction_n = fibers
        .iter()
        .map(|f| f.n_lambda)
        .collect::<Option<Vec<_>>>()
        .map(|ns| ns.into_iter().max().unwrap_or(1));
    report.fiber_results = fibers
        .iter()
        .map(|f| (FiberPoint::Value(f.lambda), f.fiber_ideal.clone()))
        .collect();
    report.restriction_n = restriction_n;
    Ok(RestrictionReport {
        chain: report,
        fibers,
        restriction_n,
    })
}

#[derive(Clone, Debug)]
pub struct HslBound {
    /// Maximum fiber HSL number.
    pub hsl: usize,
    pub restriction_n: Option<u32>,
    /// `hsl ≤ restriction_n`; false when the bound fails or `N` is unknown.
    pub within_bound: bool,
    pub per_fiber: Vec<(FieldElement, usize)>,
}

/// Maximum HSL number over the fibers, checked against the restriction
/// index of the σ-chain.
pub fn hsl_uniform_bound(spec: &FamilySpec, n_max: u32) -> Result<HslBound> {
    let sigma_spec = if spec.mode.is_tau() {
        spec.with_mode(match spec.mode {
            ChainMode::OmegaTau => ChainMode::OmegaSigma,
            _ => ChainMode::Sigma,
        })?
    } else {
        spec.clone()
    };
    let rep = verify_restriction_theorem(&sigma_spec, n_max)?;
    let per_fiber: Vec<(FieldElement, usize)> = rep.fibers.iter().map(|f| (f.lambda, f.hsl)).collect();
    let hsl = per_fiber.iter().map(|&(_, h)| h).max().unwrap_or(0);
    Ok(HslBound {
        hsl,
        restriction_n: rep.restriction_n,
        within_bound: rep.restriction_n.is_some_and(|n| hsl as u64 <= n as u64),
        per_fiber,
    })
}

/// The total space as a ring without base: fiber variables plus an
/// ordinary variable `T = t^{1/p^j}`.
fn absolute_ring(ring: &PolyRing) -> Result<Arc<PolyRing>> {
    let mut vars = ring.var_names().to_vec();
    let mut name = String::from("T");
    while vars.contains(&name) {
        name.push('_');
    }
    vars.push(name);
    PolyRing::new(ring.field().clone(), vars, None)
}

/// Rewrite `s`-exponents by `a ↦ a · num / den`.
fn rescale_base(from: &PolyRing, to: &PolyRing, f: &Polynomial, num: u64, den: u64) -> Result<Polynomial> {
    let b = from.base_index().or_else(|| to.base_index()).unwrap_or(from.nvars() - 1);
    let mut terms = Vec::with_capacity(f.len());
    for (m, c) in f.terms() {
        let mut exps: Vec<u64> = m.exponents().to_vec();
        let scaled = exps[b] as u128 * num as u128;
        if !scaled.is_multiple_of(den as u128) {
            return Err(Error::DepthExhausted("base exponent does not rescale".into()));
        }
        exps[b] = u64::try_from(scaled / den as u128).map_err(|_| Error::ExponentOverflow("base exponent".into()))?;
        terms.push((Monomial::from_exponents(&exps), *c));
    }
    Ok(to.from_terms(terms))
}

/// Outcome of [`absolutize_and_compare`].
#[derive(Clone, Debug)]
pub struct AbsoluteComparison {
    pub equal: bool,
    /// `Image(γ^n)` read back into the family ring.
    pub absolute_image: Ideal,
    pub relative_image: Ideal,
    /// The base-trace containment `Q ⊆ θ(Q)·R` on the total space.
    pub theta_contains: bool,
}

/// `Image(γ^n)` for the absolute map on the total space, with `t` an
/// ordinary variable re-parametrized as `T^{p^{ne}}`, compared with `a_n`.
pub fn absolutize_and_compare(spec: &FamilySpec, n: u32) -> Result<AbsoluteComparison> {
    spec.check_depth(n)?;
    let ring = spec.ring();
    let abs = absolute_ring(ring)?;
    let j = spec.map.e() * n;
    let q = checked_pow(ring.characteristic(), j).ok_or_else(|| Error::ExponentOverflow(format!("p^{j}")))?;
    let scale = ring.base_scale();
    let down = |f: &Polynomial| rescale_base(ring, &abs, f, q, scale);
    let relations = Ideal::new(
        abs.clone(),
        spec.relations().generators().iter().map(down).collect::<Result<Vec<_>>>()?,
    );
    let u = down(spec.map.multiplier())?;
    let gamma = CartierMap::new(&relations, spec.map.e(), u, RootMode::Absolute)?;
    let image = gamma.image_ideal(&Ideal::unit(abs.clone()), n)?;

    let mut split = vec![false; abs.nvars()];
    split[abs.nvars() - 1] = true;
    let theta = partial_root(&image, q, &split)?;
    let theta_ext = Ideal::new(
        abs.clone(),
        theta
            .generators()
            .iter()
            .map(|g| rescale_base(&abs, &abs, g, q, 1))
            .collect::<Result<Vec<_>>>()?,
    )
    .sum(&relations)?;
    let theta_contains = theta_ext.contains(&image);

    let up = Ideal::new(
        ring.clone(),
        image
            .generators()
            .iter()
            .map(|g| rescale_base(&abs, ring, g, scale, q))
            .collect::<Result<Vec<_>>>()?,
    )
    .reduced();
    let relative = spec.map.image_ideal(&Ideal::unit(ring.clone()), n)?.reduced();
    Ok(AbsoluteComparison {
        equal: up == relative,
        absolute_image: up,
        relative_image: relative,
        theta_contains,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RelativeFlags {
    pub relatively_sharply_f_pure: bool,
    pub relatively_strongly_f_regular: Option<bool>,
    pub relatively_f_injective: Option<bool>,
    pub relatively_f_rational: Option<bool>,
}

fn hits_unit(report: &ChainReport) -> bool {
    report.levels.iter().any(|(_, a)| a.is_unit())
}

/// Each flag is true iff its chain reaches the unit ideal at some level
/// `≤ n_max`. τ-flags are `None` when no seed can be built; ω-flags are
/// `None` for non-principal relations.
pub fn relative_flags(spec: &FamilySpec, n_max: u32) -> Result<RelativeFlags> {
    let base = spec.with_mode(ChainMode::Sigma)?;
    let sigma = sigma_chain(&base, n_max)?;
    let tau = match base.effective_seed() {
        Ok(_) => Some(hits_unit(&tau_chain(&spec.with_mode(ChainMode::Tau)?, n_max)?)),
        Err(e) if e.is_precondition() => None,
        Err(e) => return Err(e),
    };
    let (inj, rat) = if spec.relations().generators().len() <= 1 {
        let omega = spec.with_mode(ChainMode::OmegaSigma)?;
        let inj = if omega.map.multiplier() == base.map.multiplier() {
            hits_unit(&sigma)
        } else {
            hits_unit(&sigma_chain(&omega, n_max)?)
        };
        let omega_tau = spec.with_mode(ChainMode::OmegaTau)?;
        let rat = match omega_tau.effective_seed() {
            Ok(_) => Some(hits_unit(&tau_chain(&omega_tau, n_max)?)),
            Err(e) if e.is_precondition() => None,
            Err(e) => return Err(e),
        };
        (Some(inj), rat)
    } else {
        (None, None)
    };
    Ok(RelativeFlags {
        relatively_sharply_f_pure: hits_unit(&sigma),
        relatively_strongly_f_regular: tau,
        relatively_f_injective: inj,
        relatively_f_rational: rat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn ring(p: u64, vars: &[&str], depth: u32) -> Arc<PolyRing> {
        PolyRing::new(Field::prime(p).unwrap(), vars.iter().map(|s| s.to_string()).collect(), Some(depth)).unwrap()
    }

    fn ideal(r: &Arc<PolyRing>, gens: &[&str]) -> Ideal {
        Ideal::parse(r.clone(), gens).unwrap()
    }

    fn family(r: &Arc<PolyRing>, rel: &[&str], u: Option<&str>, mode: ChainMode) -> FamilySpec {
        let m = match u {
            Some(u) => Multiplier::Explicit(r.parse(u).unwrap()),
            None => Multiplier::Canonical,
        };
        FamilySpec::new(&ideal(r, rel), 1, m, None, mode).unwrap()
    }

    #[test]
    fn t_family_chain() {
        let r = ring(3, &["x"], 4);
        let rep = sigma_chain(&family(&r, &[], Some("t"), ChainMode::Sigma), 4).unwrap();
        let expected = ["t^(1/3)", "t^(4/9)", "t^(13/27)", "t^(40/81)"];
        for ((_, a), e) in rep.levels.iter().zip(expected) {
            assert_eq!(*a, ideal(&r, &[e]));
        }
        assert_eq!(rep.stabilization.kind, StabilizationKind::Generic);
        assert_eq!(rep.stabilization.index, Some(1));
        let w = rep.stabilization.witness.unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w.terms()[0].0.exponents()[0], 0);
    }

    #[test]
    fn global_stabilization() {
        let r = ring(3, &["x"], 3);
        let rep = sigma_chain(&family(&r, &[], Some("x^9+t"), ChainMode::Sigma), 3).unwrap();
        assert_eq!(rep.levels[0].1, ideal(&r, &["x^3+t^(1/3)"]));
        assert_eq!(rep.levels[1].1, ideal(&r, &["(x+t^(1/9))^4"]));
        assert_eq!(rep.stabilization.kind, StabilizationKind::Global);
        assert_eq!(rep.stabilization.index, Some(2));
    }

    #[test]
    fn depth_is_checked() {
        let r = ring(3, &["x"], 2);
        let spec = family(&r, &[], Some("t"), ChainMode::Sigma);
        assert!(matches!(sigma_chain(&spec, 3), Err(Error::DepthExhausted(_))));
    }

    #[test]
    fn min_t_power_examples() {
        let r = ring(3, &["x"], 2);
        assert_eq!(
            min_t_power(&Ideal::unit(r.clone()), 2).unwrap(),
            Some(TPower { units: 0, level: 2, numerator: 0, denominator: 1 })
        );
        let p = min_t_power(&ideal(&r, &["t^(4/9)"]), 2).unwrap().unwrap();
        assert_eq!((p.units, p.numerator, p.denominator), (4, 4, 9));
        // at a coarser level the exponent rounds up to the next unit
        let p = min_t_power(&ideal(&r, &["t^(4/9)"]), 1).unwrap().unwrap();
        assert_eq!((p.units, p.numerator, p.denominator), (2, 2, 3));
        assert_eq!(min_t_power(&ideal(&r, &["x"]), 2).unwrap(), None);
        assert_eq!(min_t_power(&ideal(&r, &["t+1"]), 2).unwrap(), None);
    }

    #[test]
    fn test_seeds() {
        let r = ring(7, &["x", "y"], 1);
        let cusp = family(&r, &["y^2+x^3+t"], None, ChainMode::Tau);
        assert_eq!(relative_test_seed(&cusp, 1).unwrap(), ideal(&r, &["x^2", "y", "y^2+x^3+t"]));
        let smooth = family(&r, &["x"], None, ChainMode::Tau);
        assert!(relative_test_seed(&smooth, 1).unwrap().is_unit());
        let twisted = family(&r, &["y^2+x^3+t*x"], None, ChainMode::Tau);
        assert_eq!(
            relative_test_seed(&twisted, 1).unwrap(),
            ideal(&r, &["3*x^2+t", "2*y", "y^2+x^3+t*x"])
        );
        let t_family = family(&r, &[], Some("t"), ChainMode::Tau);
        assert_eq!(relative_test_seed(&t_family, 1).unwrap(), ideal(&r, &["t"]));
    }

    #[test]
    fn fibers_of_the_t_family() {
        let r = ring(3, &["x"], 3);
        let spec = family(&r, &[], Some("t"), ChainMode::Sigma);
        let rep = sigma_chain(&spec, 3).unwrap();
        let f = r.field();
        let a1 = &rep.levels[0].1;
        assert!(restrict_fiber(a1, FiberPoint::Value(f.zero())).unwrap().is_zero());
        assert!(restrict_fiber(a1, FiberPoint::Value(f.one())).unwrap().is_unit());
        let v = verify_restriction_theorem(&spec, 3).unwrap();
        assert_eq!(v.restriction_n, Some(1));
        let b = hsl_uniform_bound(&spec, 3).unwrap();
        assert_eq!(b.hsl, 1);
        assert!(b.within_bound);
    }

    #[test]
    fn fibers_of_the_inseparable_family() {
        let r = ring(3, &["x"], 3);
        let spec = family(&r, &[], Some("x^9+t"), ChainMode::Sigma);
        let rep = sigma_chain(&spec, 3).unwrap();
        let fr = fiber_ring(&r).unwrap();
        let one = r.field().one();
        assert_eq!(
            restrict_fiber(&rep.levels[1].1, FiberPoint::Value(one)).unwrap(),
            Ideal::parse(fr.clone(), &["(x+1)^4"]).unwrap()
        );
        let fiber_sigma = sigma_absolute(&restrict_map(spec.map(), one).unwrap()).unwrap();
        assert_eq!(fiber_sigma.sigma, Ideal::parse(fr, &["(x+1)^4"]).unwrap());
        assert_eq!(verify_restriction_theorem(&spec, 3).unwrap().restriction_n, Some(2));
        assert_eq!(hsl_uniform_bound(&spec, 3).unwrap().hsl, 2);
    }

    #[test]
    fn trivial_multiplier() {
        let r = ring(3, &["x"], 3);
        let spec = family(&r, &[], Some("1"), ChainMode::Sigma);
        let rep = sigma_chain(&spec, 3).unwrap();
        assert!(rep.levels.iter().all(|(_, a)| a.is_unit()));
        assert_eq!(verify_restriction_theorem(&spec, 3).unwrap().restriction_n, Some(1));
        assert_eq!(hsl_uniform_bound(&spec, 3).unwrap().hsl, 0);
        assert!(absolutize_and_compare(&spec, 2).unwrap().equal);
    }

    #[test]
    fn tau_chain_of_the_section_family() {
        let r = ring(3, &["x"], 5);
        let seed = ideal(&r, &["x^3+t"]);
        let spec = FamilySpec::new(
            &Ideal::zero(r.clone()),
            1,
            Multiplier::Explicit(r.parse("x^9+t").unwrap()),
            Some(seed),
            ChainMode::Tau,
        )
        .unwrap();
        let rep = tau_chain(&spec, 5).unwrap();
        let b1 = ideal(&r, &["x^3+t", "(x^3+t^(1/3))*(x+t^(1/3))"]);
        assert_eq!(rep.levels[0].1, b1);
        let b2 = b1.sum(&ideal(&r, &["(x+t^(1/9))*(x^3+t^(1/3))"])).unwrap();
        assert_eq!(rep.levels[1].1, b2);
        for (_, b) in &rep.levels[2..] {
            assert_eq!(*b, b2);
        }
        assert_eq!(rep.stabilization.kind, StabilizationKind::Global);
    }

    #[test]
    fn zero_seed_is_rejected() {
        let r = ring(3, &["x"], 2);
        let spec = FamilySpec::new(
            &Ideal::zero(r.clone()),
            1,
            Multiplier::Explicit(r.one()),
            Some(Ideal::zero(r.clone())),
            ChainMode::Tau,
        )
        .unwrap();
        assert!(tau_chain(&spec, 2).unwrap_err().is_precondition());
    }

    #[test]
    fn absolutize_the_t_family() {
        let r = ring(3, &["x"], 2);
        let spec = family(&r, &[], Some("t"), ChainMode::Sigma);
        for n in 1..=2 {
            let c = absolutize_and_compare(&spec, n).unwrap();
            assert!(c.equal, "n = {n}");
            assert!(c.theta_contains);
        }
    }

    #[test]
    fn flags_of_simple_families() {
        let r = ring(3, &["x", "y"], 2);
        let smooth = family(&r, &["x"], None, ChainMode::Sigma);
        let f = relative_flags(&smooth, 2).unwrap();
        assert_eq!(
            f,
            RelativeFlags {
                relatively_sharply_f_pure: true,
                relatively_strongly_f_regular: Some(true),
                relatively_f_injective: Some(true),
                relatively_f_rational: Some(true),
            }
        );
        let r1 = ring(3, &["x"], 2);
        let t = family(&r1, &[], Some("t"), ChainMode::Sigma);
        assert!(!relative_flags(&t, 2).unwrap().relatively_sharply_f_pure);
    }
}
