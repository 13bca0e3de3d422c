//! Invariants of a single ring over a perfect field: the stable image σ,
//! the test ideal τ, and the Frobenius singularity flags derived from them.

use crate::error::{Error, Result};
use crate::field::checked_pow;
use crate::frobenius::{bracket_power, fedder_ideal, CartierMap, RootMode};
use crate::ideal::Ideal;
use crate::poly::{PolyRing, Polynomial};

/// Cap on chain length for σ and τ.
pub const CHAIN_CAP: usize = 64;

/// Descending chain `R ⊇ φ(R) ⊇ φ²(R) ⊇ ...` up to stabilization.
#[derive(Clone, Debug)]
pub struct SigmaChain {
    pub sigma: Ideal,
    /// First `n` with `image_n = image_{n+1}`.
    pub hsl: usize,
    /// `chain[n] = φ^n(R)`, with `chain[0]` the unit ideal; ends with the
    /// repeated stable ideal.
    pub chain: Vec<Ideal>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbsoluteFlags {
    pub f_pure: bool,
    pub strongly_f_regular: Option<bool>,
    pub f_injective: Option<bool>,
    pub f_rational: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct AbsoluteInvariantReport {
    pub sigma: Ideal,
    pub hsl: usize,
    pub tau: Option<Ideal>,
    pub flags: AbsoluteFlags,
    pub chain_trace: Vec<Ideal>,
}

fn require_perfect_base(map: &CartierMap) -> Result<()> {
    if map.ring().has_base() {
        return Err(Error::precondition(
            "absolute invariants need a ring without base variable; restrict to a fiber first",
        ));
    }
    Ok(())
}

/// σ via `image_{n+1} = φ(image_n)`.
pub fn sigma_absolute(map: &CartierMap) -> Result<SigmaChain> {
    require_perfect_base(map)?;
    let ring = map.ring();
    let mut chain = vec![Ideal::unit(ring.clone()).sum(map.relations())?.reduced()];
    for n in 0..CHAIN_CAP {
        let next = map.apply(&chain[n])?.reduced();
        let stable = next == chain[n];
        chain.push(next);
        if stable {
            return Ok(SigmaChain {
                sigma: chain[n].clone(),
                hsl: n,
                chain,
            });
        }
    }
    Err(Error::IterationCap {
        what: "sigma chain",
        cap: CHAIN_CAP,
    })
}

/// Ascending chain `c_0 = seed`, `c_{n+1} = seed + φ(c_n)`, whose union is
/// `Σ_i φ^i(seed)`.
pub fn tau_chain_absolute(map: &CartierMap, seed: &Ideal) -> Result<Vec<Ideal>> {
    require_perfect_base(map)?;
    let seed = seed.sum(map.relations())?.reduced();
    if seed == map.relations().reduced() {
        return Err(Error::precondition("seed vanishes modulo the relations"));
    }
    let mut chain = vec![seed.clone()];
    for n in 0..CHAIN_CAP {
        let next = seed.sum(&map.apply(&chain[n])?)?.reduced();
        let stable = next == chain[n];
        chain.push(next);
        if stable {
            return Ok(chain);
        }
    }
    Err(Error::IterationCap {
        what: "tau chain",
        cap: CHAIN_CAP,
    })
}

pub fn tau_absolute(map: &CartierMap, seed: &Ideal) -> Result<Ideal> {
    Ok(tau_chain_absolute(map, seed)?.pop().expect("chain is nonempty"))
}

/// Fedder's criterion at the ideal `at` (default: the origin).
pub fn is_f_pure(relations: &Ideal, e: u32, at: Option<&Ideal>) -> Result<bool> {
    let ring = relations.ring();
    let origin;
    let at = match at {
        Some(a) => a,
        None => {
            origin = Ideal::new(ring.clone(), (0..ring.num_fiber_vars()).map(|i| ring.var(i)));
            &origin
        }
    };
    let q = checked_pow(ring.characteristic(), e).ok_or_else(|| Error::ExponentOverflow(format!("p^{e}")))?;
    let m_q = bracket_power(at, q, RootMode::Absolute)?;
    Ok(!m_q.contains(&fedder_ideal(relations, e)?))
}

fn determinant(ring: &PolyRing, m: &[Vec<Polynomial>]) -> Polynomial {
    match m.len() {
        0 => ring.one(),
        1 => m[0][0].clone(),
        n => {
            let mut acc = ring.zero();
            for col in 0..n {
                if m[0][col].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Polynomial>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(c, _)| c != col).map(|(_, x)| x.clone()).collect())
                    .collect();
                let term = ring.mul(&m[0][col], &determinant(ring, &minor));
                acc = if col % 2 == 0 { ring.add(&acc, &term) } else { ring.sub(&acc, &term) };
            }
            acc
        }
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Maximal minors of the Jacobian matrix of the generators with respect to
/// the given columns of partial derivatives.
pub(crate) fn jacobian_minors(relations: &Ideal, columns: &[Vec<Polynomial>]) -> Ideal {
    let ring = relations.ring();
    let c = relations.generators().len();
    let gens = subsets(columns.len(), c).into_iter().map(|cols| {
        let m: Vec<Vec<Polynomial>> = (0..c).map(|r| cols.iter().map(|&k| columns[k][r].clone()).collect()).collect();
        determinant(ring, &m)
    });
    Ideal::new(ring.clone(), gens)
}

/// Jacobian ideal plus the relations: partials in every fiber variable,
/// and in `t` when the ring has a base. Relations with more than one
/// generator are treated as a complete intersection (maximal minors).
pub fn test_element_hypersurface(relations: &Ideal) -> Result<Ideal> {
    let ring = relations.ring();
    if relations.is_zero() {
        return Ok(Ideal::unit(ring.clone()));
    }
    let mut columns = Vec::new();
    for v in 0..ring.num_fiber_vars() {
        columns.push(
            relations
                .generators()
                .iter()
                .map(|g| ring.partial_derivative(g, v))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    if ring.has_base() {
        columns.push(relations.generators().iter().map(|g| ring.partial_t(g)).collect::<Result<Vec<_>>>()?);
    }
    let jac = jacobian_minors(relations, &columns).sum(relations)?.reduced();
    if jac == relations.reduced() {
        return Err(Error::precondition(
            "Jacobian ideal vanishes modulo the relations (non-reduced input)",
        ));
    }
    Ok(jac)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OmegaFlags {
    pub f_injective: bool,
    pub f_rational: bool,
}

/// F-injectivity and F-rationality of `S/⟨f⟩` through the map
/// `f^{p^e - 1}` on the free canonical module.
pub fn omega_invariants_hypersurface(relations: &Ideal, e: u32) -> Result<OmegaFlags> {
    if relations.generators().len() > 1 {
        return Err(Error::precondition("expected a principal ideal"));
    }
    let map = CartierMap::canonical(relations, e, RootMode::Absolute)?;
    let sigma = sigma_absolute(&map)?.sigma;
    let tau = tau_absolute(&map, &test_element_hypersurface(relations)?)?;
    Ok(OmegaFlags {
        f_injective: sigma.is_unit(),
        f_rational: tau.is_unit(),
    })
}

/// σ, the optional τ and all flags for one map. τ is computed when a seed
/// is given; the ω flags when the relations are principal (or zero).
pub fn absolute_report(map: &CartierMap, seed: Option<&Ideal>) -> Result<AbsoluteInvariantReport> {
    let chain = sigma_absolute(map)?;
    let tau = seed.map(|s| tau_absolute(map, s)).transpose()?;
    let omega = if map.relations().generators().len() <= 1 {
        Some(omega_invariants_hypersurface(map.relations(), map.e())?)
    } else {
        None
    };
    Ok(AbsoluteInvariantReport {
        flags: AbsoluteFlags {
            f_pure: is_f_pure(map.relations(), map.e(), None)?,
            strongly_f_regular: tau.as_ref().map(Ideal::is_unit),
            f_injective: omega.map(|o| o.f_injective),
            f_rational: omega.map(|o| o.f_rational),
        },
        sigma: chain.sigma,
        hsl: chain.hsl,
        tau,
        chain_trace: chain.chain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use std::sync::Arc;

    fn ring(p: u64, vars: &[&str]) -> Arc<PolyRing> {
        PolyRing::new(Field::prime(p).unwrap(), vars.iter().map(|s| s.to_string()).collect(), None).unwrap()
    }

    fn ideal(r: &Arc<PolyRing>, gens: &[&str]) -> Ideal {
        Ideal::parse(r.clone(), gens).unwrap()
    }

    fn map(r: &Arc<PolyRing>, rel: &[&str], u: &str) -> CartierMap {
        CartierMap::new(&ideal(r, rel), 1, r.parse(u).unwrap(), RootMode::Absolute).unwrap()
    }

    #[test]
    fn sigma_examples() {
        let r = ring(3, &["x"]);
        let s = sigma_absolute(&map(&r, &[], "1")).unwrap();
        assert!(s.sigma.is_unit());
        assert_eq!(s.hsl, 0);
        let s = sigma_absolute(&map(&r, &[], "x^3")).unwrap();
        assert_eq!(s.sigma, ideal(&r, &["x"]));
        assert_eq!(s.hsl, 1);
        assert_eq!(s.chain.len(), 3);

        let r7 = ring(7, &["x", "y"]);
        let cusp = CartierMap::canonical(&ideal(&r7, &["y^2+x^3"]), 1, RootMode::Absolute).unwrap();
        let s = sigma_absolute(&cusp).unwrap();
        assert_eq!(s.sigma, ideal(&r7, &["x", "y"]));
    }

    #[test]
    fn one_variable_chain_oracle() {
        // image_n of u = x^3 over F_3 is the root of x^{3(3^n-1)/2} of order 3^n,
        // i.e. x^{floor(3(3^n-1)/2 / 3^n)}
        let r = ring(3, &["x"]);
        let phi = map(&r, &[], "x^3");
        let unit = Ideal::unit(r.clone());
        for n in 1..=4u32 {
            let e = 3 * (3u64.pow(n) - 1) / 2 / 3u64.pow(n);
            let expected = Ideal::principal(r.clone(), r.pow(&r.var(0), e).unwrap());
            assert_eq!(phi.image_ideal(&unit, n).unwrap(), expected, "n = {n}");
        }
    }

    #[test]
    fn fedder_purity() {
        let r3 = ring(3, &["x", "y"]);
        assert!(is_f_pure(&ideal(&r3, &["x*y"]), 1, None).unwrap());
        assert!(is_f_pure(&Ideal::zero(r3.clone()), 1, None).unwrap());
        let r7 = ring(7, &["x", "y"]);
        assert!(!is_f_pure(&ideal(&r7, &["y^2+x^3"]), 1, None).unwrap());
    }

    #[test]
    fn tau_examples() {
        let r = ring(5, &["x"]);
        let x = ideal(&r, &["x"]);
        assert_eq!(tau_absolute(&map(&r, &[], "x^4"), &x).unwrap(), x);
        assert!(tau_absolute(&map(&r, &[], "1"), &x).unwrap().is_unit());
        assert!(tau_absolute(&map(&r, &[], "1"), &Ideal::unit(r.clone())).unwrap().is_unit());
    }

    #[test]
    fn jacobian_examples() {
        let r7 = ring(7, &["x", "y"]);
        assert_eq!(test_element_hypersurface(&ideal(&r7, &["y^2+x^3"])).unwrap(), ideal(&r7, &["x^2", "y"]));
        let r3 = ring(3, &["x", "y"]);
        assert_eq!(test_element_hypersurface(&ideal(&r3, &["x*y"])).unwrap(), ideal(&r3, &["x", "y"]));
        assert!(test_element_hypersurface(&ideal(&r3, &["x^3"])).is_err());
        // complete intersection: the line x = y = 0 cut out by two planes
        let r5 = ring(5, &["x", "y", "z"]);
        assert!(test_element_hypersurface(&ideal(&r5, &["x", "y"])).unwrap().is_unit());
    }

    #[test]
    fn omega_flags() {
        let r3 = ring(3, &["x", "y"]);
        let node = omega_invariants_hypersurface(&ideal(&r3, &["x*y"]), 1).unwrap();
        assert_eq!(node, OmegaFlags { f_injective: true, f_rational: false });
        let smooth = omega_invariants_hypersurface(&ideal(&r3, &["x"]), 1).unwrap();
        assert_eq!(smooth, OmegaFlags { f_injective: true, f_rational: true });
        let r7 = ring(7, &["x", "y"]);
        let cusp = omega_invariants_hypersurface(&ideal(&r7, &["y^2+x^3"]), 1).unwrap();
        assert!(!cusp.f_rational);
        assert!(!cusp.f_injective);
    }

    #[test]
    fn report_for_node() {
        let r3 = ring(3, &["x", "y"]);
        let rel = ideal(&r3, &["x*y"]);
        let phi = CartierMap::canonical(&rel, 1, RootMode::Absolute).unwrap();
        let seed = test_element_hypersurface(&rel).unwrap();
        let rep = absolute_report(&phi, Some(&seed)).unwrap();
        assert!(rep.sigma.is_unit());
        assert_eq!(rep.hsl, 0);
        assert_eq!(rep.tau.unwrap(), ideal(&r3, &["x", "y"]));
        assert_eq!(rep.flags.strongly_f_regular, Some(false));
        assert!(rep.flags.f_pure);
    }
}
