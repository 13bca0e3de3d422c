//! Ideals with a cached reduced Gröbner basis.

use std::collections::HashSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::groebner::{normal_form, reduced_basis, Terms};
use crate::monomial::{Monomial, MonomialOrder};
use crate::poly::{PolyRing, Polynomial};

/// Cap on colon iterations in [`Ideal::saturation`].
pub const SATURATION_CAP: usize = 64;

/// Finite generating set plus a lazily computed reduced Gröbner basis under
/// the ring order. Immutable; clones share nothing mutable.
#[derive(Clone)]
pub struct Ideal {
    ring: Arc<PolyRing>,
    gens: Vec<Polynomial>,
    gb: OnceLock<Arc<Vec<Polynomial>>>,
}

impl fmt::Debug for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.gens.iter().map(|g| self.ring.print(g)).collect();
        write!(f, "<{}>", gens.join(", "))
    }
}

/// Ideal equality (same ring, same reduced basis).
impl PartialEq for Ideal {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.groebner_basis() == other.groebner_basis()
    }
}

impl Eq for Ideal {}

fn to_terms(f: &Polynomial) -> Terms {
    f.terms.clone()
}

impl Ideal {
    pub fn new(ring: Arc<PolyRing>, gens: impl IntoIterator<Item = Polynomial>) -> Self {
        let mut seen = HashSet::new();
        let mut out: Vec<Polynomial> = Vec::new();
        for g in gens {
            if !g.is_zero() && seen.insert(g.clone()) {
                out.push(g);
            }
        }
        Ideal {
            ring,
            gens: out,
            gb: OnceLock::new(),
        }
    }

    pub fn zero(ring: Arc<PolyRing>) -> Self {
        Ideal::new(ring, [])
    }

    pub fn unit(ring: Arc<PolyRing>) -> Self {
        let one = ring.one();
        Ideal::new(ring, [one])
    }

    pub fn principal(ring: Arc<PolyRing>, f: Polynomial) -> Self {
        Ideal::new(ring, [f])
    }

    /// Parse generators.
    pub fn parse(ring: Arc<PolyRing>, gens: &[&str]) -> Result<Self> {
        let polys = gens.iter().map(|g| ring.parse(g)).collect::<Result<Vec<_>>>()?;
        Ok(Ideal::new(ring, polys))
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.gens
    }

    fn same_ring(&self, other: &Ideal) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::VariableMismatch("ideals live in different rings".into()));
        }
        Ok(())
    }

    /// Reduced Gröbner basis under the ring order (weighted grevlex, `s`
    /// lowest), sorted by leading monomial, descending.
    pub fn groebner_basis(&self) -> &[Polynomial] {
        self.gb.get_or_init(|| {
            let gens = self.gens.iter().map(to_terms).collect();
            let gb = reduced_basis(self.ring.field(), self.ring.order(), gens);
            Arc::new(gb.into_iter().map(|terms| Polynomial { terms }).collect())
        })
    }

    /// Reduced Gröbner basis under another order, converted back to
    /// canonical polynomials (listed in that order's leading-term sequence).
    pub fn groebner_basis_in(&self, order: &MonomialOrder) -> Vec<Polynomial> {
        if order == self.ring.order() {
            return self.groebner_basis().to_vec();
        }
        let gens = self.gens.iter().map(to_terms).collect();
        reduced_basis(self.ring.field(), order, gens)
            .into_iter()
            .map(|terms| self.ring.from_terms(terms))
            .collect()
    }

    /// An ideal with the same generators and its basis precomputed.
    pub fn reduced(&self) -> Ideal {
        let gb = self.groebner_basis().to_vec();
        let out = Ideal::new(self.ring.clone(), gb.clone());
        let _ = out.gb.set(Arc::new(gb));
        out
    }

    pub fn normal_form(&self, f: &Polynomial) -> Polynomial {
        let gb: Vec<Terms> = self.groebner_basis().iter().map(to_terms).collect();
        Polynomial {
            terms: normal_form(self.ring.field(), self.ring.order(), to_terms(f), &gb),
        }
    }

    pub fn contains_poly(&self, f: &Polynomial) -> bool {
        self.normal_form(f).is_zero()
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &Ideal) -> bool {
        if self.is_unit() {
            return true;
        }
        let gb: Vec<Terms> = self.groebner_basis().iter().map(to_terms).collect();
        other
            .gens
            .iter()
            .all(|g| normal_form(self.ring.field(), self.ring.order(), to_terms(g), &gb).is_empty())
    }

    pub fn is_unit(&self) -> bool {
        let gb = self.groebner_basis();
        gb.len() == 1 && gb[0].is_unit()
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn sum(&self, other: &Ideal) -> Result<Ideal> {
        self.same_ring(other)?;
        Ok(Ideal::new(
            self.ring.clone(),
            self.gens.iter().chain(other.gens.iter()).cloned(),
        ))
    }

    pub fn product(&self, other: &Ideal) -> Result<Ideal> {
        self.same_ring(other)?;
        let r = &self.ring;
        Ok(Ideal::new(
            r.clone(),
            self.gens
                .iter()
                .flat_map(|f| other.gens.iter().map(move |g| r.mul(f, g))),
        ))
    }

    pub fn power(&self, n: u32) -> Ideal {
        let mut acc = Ideal::unit(self.ring.clone());
        for _ in 0..n {
            acc = acc.product(self).expect("same ring").reduced();
        }
        acc
    }

    /// Multiply every generator by `f`.
    pub fn scale(&self, f: &Polynomial) -> Ideal {
        Ideal::new(self.ring.clone(), self.gens.iter().map(|g| self.ring.mul(f, g)))
    }

    /// `I ∩ J` via `(w I + (1 - w) J) ∩ k[vars]` with one auxiliary variable.
    pub fn intersection(&self, other: &Ideal) -> Result<Ideal> {
        self.same_ring(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Ideal::zero(self.ring.clone()));
        }
        if self.is_unit() {
            return Ok(other.clone());
        }
        if other.is_unit() {
            return Ok(self.clone());
        }
        let field = self.ring.field();
        let lift = |f: &Polynomial, w: u64| -> Terms {
            f.terms
                .iter()
                .map(|(m, c)| {
                    let mut e = smallvec::SmallVec::with_capacity(m.0.len() + 1);
                    e.push(w);
                    e.extend_from_slice(&m.0);
                    (Monomial(e), *c)
                })
                .collect()
        };
        let mut gens: Vec<Terms> = Vec::new();
        for f in &self.gens {
            gens.push(lift(f, 1));
        }
        for g in &other.gens {
            let mut t = lift(g, 0);
            t.extend(
                lift(g, 1)
                    .into_iter()
                    .map(|(m, c)| (m, field.neg(c))),
            );
            gens.push(t);
        }
        let order = self.ring.order().with_leading_elim_var();
        let gb = reduced_basis(field, &order, gens);
        let kept = gb
            .into_iter()
            .filter(|g| g.iter().all(|(m, _)| m.0[0] == 0))
            .map(|g| {
                self.ring.from_terms(
                    g.into_iter()
                        .map(|(m, c)| (Monomial(smallvec::SmallVec::from_slice(&m.0[1..])), c)),
                )
            });
        Ok(Ideal::new(self.ring.clone(), kept).reduced())
    }

    /// `(I : f)`.
    pub fn colon_poly(&self, f: &Polynomial) -> Result<Ideal> {
        if f.is_zero() {
            return Err(Error::ColonByZero);
        }
        if self.contains_poly(f) {
            return Ok(Ideal::unit(self.ring.clone()));
        }
        if f.is_unit() {
            return Ok(self.clone());
        }
        let principal = Ideal::principal(self.ring.clone(), f.clone());
        let meet = self.intersection(&principal)?;
        let quotients = meet
            .groebner_basis()
            .iter()
            .map(|g| {
                self.ring
                    .div_exact(g, f)
                    .ok_or_else(|| Error::InvariantViolated("intersection element not divisible".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Ideal::new(self.ring.clone(), quotients).reduced())
    }

    /// `(I : J) = ∩_{g ∈ gens J} (I : g)`.
    pub fn colon(&self, other: &Ideal) -> Result<Ideal> {
        self.same_ring(other)?;
        if other.is_zero() {
            return Err(Error::ColonByZero);
        }
        let mut acc: Option<Ideal> = None;
        for g in &other.gens {
            let part = self.colon_poly(g)?;
            acc = Some(match acc {
                None => part,
                Some(a) => a.intersection(&part)?,
            });
        }
        Ok(acc.expect("nonzero ideal has generators"))
    }

    /// `(I : J^∞)`, iterating colons until stable.
    pub fn saturation(&self, other: &Ideal) -> Result<Ideal> {
        let mut cur = self.reduced();
        for _ in 0..SATURATION_CAP {
            let next = cur.colon(other)?;
            if next == cur {
                return Ok(cur);
            }
            cur = next;
        }
        Err(Error::IterationCap {
            what: "saturation",
            cap: SATURATION_CAP,
        })
    }

    /// `I ∩ k[remaining variables]`, returned in the same ring.
    pub fn eliminate(&self, vars: &[usize]) -> Result<Ideal> {
        let n = self.ring.nvars();
        let mut mask = vec![false; n];
        for &v in vars {
            if v >= n {
                return Err(Error::VariableMismatch(format!("no variable with index {v}")));
            }
            mask[v] = true;
        }
        let order = self.ring.elimination_order(mask.clone());
        let kept = self
            .groebner_basis_in(&order)
            .into_iter()
            .filter(|g| g.terms.iter().all(|(m, _)| (0..n).all(|i| !mask[i] || m.0[i] == 0)));
        Ok(Ideal::new(self.ring.clone(), kept).reduced())
    }

    /// `I ∩ F_{p^k}[s]`. The result is principal: its reduced basis has at
    /// most one element.
    pub fn contract_to_base(&self) -> Result<Ideal> {
        if !self.ring.has_base() {
            return Err(Error::precondition("contraction needs a base variable"));
        }
        let fiber: Vec<usize> = (0..self.ring.num_fiber_vars()).collect();
        self.eliminate(&fiber)
    }

    /// The monic generator of [`Ideal::contract_to_base`], zero if the
    /// contraction is zero.
    pub fn base_generator(&self) -> Result<Polynomial> {
        let c = self.contract_to_base()?;
        Ok(c.groebner_basis().first().cloned().unwrap_or_else(Polynomial::zero))
    }

    /// Equality at the generic point of the base line. Returns a witness
    /// `h(s)` such that the ideals agree after inverting `h`.
    pub fn generically_equal(&self, other: &Ideal) -> Result<(bool, Option<Polynomial>)> {
        self.same_ring(other)?;
        if self == other {
            return Ok((true, Some(self.ring.one())));
        }
        let r = &self.ring;
        let mut witness = r.one();
        for (a, b) in [(self, other), (other, self)] {
            // every generator of a must lie in b after inverting some h(s)
            for g in a.groebner_basis() {
                let h = b.colon_poly(g)?.base_generator()?;
                if h.is_zero() {
                    return Ok((false, None));
                }
                witness = r.mul(&witness, &h);
            }
        }
        Ok((true, Some(r.monic(&witness))))
    }

    /// Generators for display: the reduced basis of `self + relations`
    /// with the elements lying in `relations` dropped, printed and sorted.
    /// The zero ideal prints as `["0"]`, the unit ideal as `["1"]`.
    pub fn display_generators(&self, relations: Option<&Ideal>) -> Vec<String> {
        let full = match relations {
            Some(rel) => self.sum(rel).expect("same ring"),
            None => self.clone(),
        };
        if full.is_unit() {
            return vec!["1".into()];
        }
        let mut out: Vec<String> = full
            .groebner_basis()
            .iter()
            .filter(|g| relations.is_none_or(|rel| !rel.contains_poly(g)))
            .map(|g| self.ring.print(g))
            .collect();
        if out.is_empty() {
            return vec!["0".into()];
        }
        out.sort();
        out
    }
}
