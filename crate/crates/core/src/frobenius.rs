//! Frobenius powers, Frobenius roots and Cartier maps.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::checked_pow;
use crate::ideal::Ideal;
use crate::monomial::Monomial;
use crate::poly::{PolyRing, Polynomial};

/// Largest exponent `(p^{ne} - 1)/(p^e - 1)` accepted by [`CartierMap::compose`].
pub const COMPOSE_EXPONENT_CAP: u64 = 1 << 20;

/// Which exponents a root splits into residue classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RootMode {
    /// Every variable, `s` included, is split: the root over `F_{p^k}`.
    Absolute,
    /// Only the fiber variables are split; `s`-exponents must be divisible
    /// by `q` and are divided, moving the result up the base tower.
    Relative,
}

/// What a root does with one variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum VarAction {
    /// Group by the exponent residue mod `q`, keep the quotient.
    Split,
    /// Exponent must be divisible by `q`; divide it.
    Divide,
    /// Leave the exponent alone.
    Keep,
}

/// `j` with `q = p^j`, checking that `step | j` when `step > 0`.
pub fn p_power_exponent(p: u64, q: u64, step: u32) -> Result<u32> {
    let not_a_power = || Error::NotAPower { q, p, e: step.max(1) };
    if q == 0 {
        return Err(not_a_power());
    }
    let mut j = 0u32;
    let mut r = q;
    while r > 1 {
        if !r.is_multiple_of(p) {
            return Err(not_a_power());
        }
        r /= p;
        j += 1;
    }
    if step > 0 && !j.is_multiple_of(step) {
        return Err(not_a_power());
    }
    Ok(j)
}

fn actions_for(ring: &PolyRing, mode: RootMode) -> Vec<VarAction> {
    let mut a = vec![VarAction::Split; ring.nvars()];
    if let (RootMode::Relative, Some(b)) = (mode, ring.base_index()) {
        a[b] = VarAction::Divide;
    }
    a
}

/// `I^{[q]}`: generated by `g^q` over the generators. Both modes agree on
/// polynomial generators.
pub fn bracket_power(ideal: &Ideal, q: u64, _mode: RootMode) -> Result<Ideal> {
    let ring = ideal.ring();
    let j = p_power_exponent(ring.characteristic(), q, 0)?;
    let gens = ideal
        .generators()
        .iter()
        .map(|g| ring.frobenius_power(g, j))
        .collect::<Result<Vec<_>>>()?;
    Ok(Ideal::new(ring.clone(), gens))
}

/// Residue-class components of `f` with respect to `x^r`, `0 ≤ r < q`, on
/// the split variables. Returned monic, in first-seen order.
pub(crate) fn root_components(
    ring: &PolyRing,
    f: &Polynomial,
    j: u32,
    actions: &[VarAction],
) -> Result<Vec<Polynomial>> {
    let field = ring.field();
    let q = checked_pow(ring.characteristic(), j).ok_or_else(|| Error::ExponentOverflow(format!("p^{j}")))?;
    let mut classes: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut parts: Vec<Vec<(Monomial, crate::field::FieldElement)>> = Vec::new();
    for (m, c) in f.terms() {
        let mut residue = Vec::new();
        let mut root = m.clone();
        for (i, act) in actions.iter().enumerate() {
            let e = m.0[i];
            match act {
                VarAction::Split => {
                    residue.push(e % q);
                    root.0[i] = e / q;
                }
                VarAction::Divide => {
                    if e % q != 0 {
                        return Err(Error::DepthExhausted(format!(
                            "s-exponent {e} is not divisible by {q}; increase the depth"
                        )));
                    }
                    root.0[i] = e / q;
                }
                VarAction::Keep => {}
            }
        }
        let idx = *classes.entry(residue).or_insert_with(|| {
            parts.push(Vec::new());
            parts.len() - 1
        });
        parts[idx].push((root, field.frobenius_inverse(*c, j)));
    }
    Ok(parts
        .into_iter()
        .map(|terms| ring.monic(&ring.from_terms(terms)))
        .collect())
}

pub(crate) fn root_with(ideal: &Ideal, q: u64, actions: &[VarAction]) -> Result<Ideal> {
    let ring = ideal.ring();
    let j = p_power_exponent(ring.characteristic(), q, 0)?;
    let mut gens = Vec::new();
    for g in ideal.generators() {
        gens.extend(root_components(ring, g, j, actions)?);
    }
    Ok(Ideal::new(ring.clone(), gens))
}

/// `I^{[1/q]}`: the smallest ideal `J` with `I ⊆ J^{[q]}`.
pub fn frobenius_root(ideal: &Ideal, q: u64, mode: RootMode) -> Result<Ideal> {
    root_with(ideal, q, &actions_for(ideal.ring(), mode))
}

/// Root along the flagged variables only; the other exponents are kept.
pub fn partial_root(ideal: &Ideal, q: u64, split: &[bool]) -> Result<Ideal> {
    let actions: Vec<VarAction> = split
        .iter()
        .map(|&b| if b { VarAction::Split } else { VarAction::Keep })
        .collect();
    root_with(ideal, q, &actions)
}

/// `(f_1 ⋯ f_c)^{p^e - 1}` over the generators; well defined on `S/I` for
/// a complete intersection `I = ⟨f_1, ..., f_c⟩`.
pub fn canonical_multiplier(relations: &Ideal, e: u32) -> Result<Polynomial> {
    let ring = relations.ring();
    let q = checked_pow(ring.characteristic(), e).ok_or_else(|| Error::ExponentOverflow(format!("p^{e}")))?;
    let mut u = ring.one();
    for g in relations.generators() {
        u = ring.mul(&u, g);
    }
    ring.pow(&u, q - 1)
}

/// `(I^{[p^e]} : I)`; the unit ideal when `I = 0`.
pub fn fedder_ideal(ideal: &Ideal, e: u32) -> Result<Ideal> {
    let ring = ideal.ring();
    if ideal.is_zero() {
        return Ok(Ideal::unit(ring.clone()));
    }
    let q = checked_pow(ring.characteristic(), e).ok_or_else(|| Error::ExponentOverflow(format!("p^{e}")))?;
    bracket_power(ideal, q, RootMode::Absolute)?.colon(ideal)
}

/// A `p^{-e}`-linear map on `S/I`, stored by its multiplier:
/// `φ(r) = (u r)^{1/p^{e·level}}`.
#[derive(Clone, Debug)]
pub struct CartierMap {
    relations: Ideal,
    e: u32,
    u: Polynomial,
    level: u32,
    mode: RootMode,
}

impl CartierMap {
    /// Checks `u I ⊆ I^{[p^e]}`, which makes the map descend to `S/I`.
    pub fn new(relations: &Ideal, e: u32, u: Polynomial, mode: RootMode) -> Result<Self> {
        if e == 0 {
            return Err(Error::precondition("step e must be at least 1"));
        }
        let ring = relations.ring();
        let q = checked_pow(ring.characteristic(), e).ok_or_else(|| Error::ExponentOverflow(format!("p^{e}")))?;
        let bracket = bracket_power(relations, q, mode)?;
        for g in relations.generators() {
            if !bracket.contains_poly(&ring.mul(&u, g)) {
                return Err(Error::IllDefinedMap { relation: ring.print(g) });
            }
        }
        Ok(CartierMap {
            relations: relations.clone(),
            e,
            u,
            level: 1,
            mode,
        })
    }

    /// The map with multiplier [`canonical_multiplier`].
    pub fn canonical(relations: &Ideal, e: u32, mode: RootMode) -> Result<Self> {
        Self::new(relations, e, canonical_multiplier(relations, e)?, mode)
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        self.relations.ring()
    }

    pub fn relations(&self) -> &Ideal {
        &self.relations
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn multiplier(&self) -> &Polynomial {
        &self.u
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn mode(&self) -> RootMode {
        self.mode
    }

    /// `p`-exponent of the root order: `e · level`.
    pub fn root_exponent(&self) -> u32 {
        self.e * self.level
    }

    /// `φ^n`, with multiplier `u^{1 + Q + ... + Q^{n-1}}`, `Q = p^{e·level}`.
    pub fn compose(&self, n: u32) -> Result<CartierMap> {
        if n == 0 {
            return Err(Error::precondition("compose needs n >= 1"));
        }
        let ring = self.ring();
        let j = self.root_exponent();
        let step = checked_pow(ring.characteristic(), j).ok_or_else(|| Error::ExponentOverflow(format!("p^{j}")))?;
        let mut exponent: u64 = 0;
        let mut power: u64 = 1;
        for i in 0..n {
            exponent = exponent
                .checked_add(power)
                .filter(|&x| x <= COMPOSE_EXPONENT_CAP)
                .ok_or_else(|| Error::ExponentOverflow(format!("multiplier exponent of the {}-fold composite", i + 1)))?;
            if i + 1 < n {
                power = power
                    .checked_mul(step)
                    .ok_or_else(|| Error::ExponentOverflow("p-power in composition".into()))?;
            }
        }
        Ok(CartierMap {
            relations: self.relations.clone(),
            e: self.e,
            u: ring.pow(&self.u, exponent)?,
            level: self.level * n,
            mode: self.mode,
        })
    }

    /// `next ∘ self`: apply `self`, then `next`. The multiplier is
    /// `u_next^{q_self} · u_self`.
    pub fn then(&self, next: &CartierMap) -> Result<CartierMap> {
        if self.e != next.e || self.mode != next.mode || self.relations != next.relations {
            return Err(Error::precondition("maps differ in step, mode or relations"));
        }
        let ring = self.ring();
        let lifted = ring.frobenius_power(&next.u, self.root_exponent())?;
        Ok(CartierMap {
            relations: self.relations.clone(),
            e: self.e,
            u: ring.mul(&lifted, &self.u),
            level: self.level + next.level,
            mode: self.mode,
        })
    }

    /// Apply the map once to the ideal `J`: `(u J)^{[1/Q]} + I`.
    pub fn apply(&self, j: &Ideal) -> Result<Ideal> {
        let ring = self.ring();
        let q = checked_pow(ring.characteristic(), self.root_exponent())
            .ok_or_else(|| Error::ExponentOverflow("root order".into()))?;
        frobenius_root(&j.scale(&self.u), q, self.mode)?.sum(&self.relations)
    }

    /// `φ^n(J^{1/p^{ne}})`, as an ideal of `S` containing the relations.
    pub fn image_ideal(&self, j: &Ideal, n: u32) -> Result<Ideal> {
        if n == 0 {
            return j.sum(&self.relations);
        }
        self.compose(n)?.apply(j)
    }
}
