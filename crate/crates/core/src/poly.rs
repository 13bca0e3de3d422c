//! Sparse multivariate polynomials over F_{p^k}.
//!
//! A [`PolyRing`] is F_{p^k}[x_1, ..., x_m] or F_{p^k}[x_1, ..., x_m, s] where
//! `s = t^{1/p^N}` for a fixed depth `N`. Every level `A^{1/p^j}`, `j <= N`,
//! of the base tower embeds into the same ring by scaling `s`-exponents, so
//! fractional powers of `t` never need rational exponents.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{checked_pow, Field, FieldElement};
use crate::monomial::{Monomial, MonomialOrder};

/// Polynomial in canonical form: terms sorted strictly descending under the
/// ring order, no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    pub(crate) terms: Vec<(Monomial, FieldElement)>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { terms: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Monomial, FieldElement)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|(m, _)| m)
    }

    pub fn leading_coefficient(&self) -> Option<FieldElement> {
        self.terms.first().map(|(_, c)| *c)
    }

    /// Nonzero constant.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    /// Largest exponent of variable `var` over all terms.
    pub fn degree_in(&self, var: usize) -> u64 {
        self.terms.iter().map(|(m, _)| m.0[var]).max().unwrap_or(0)
    }
}

/// F_{p^k}[x_1..x_m] or F_{p^k}[x_1..x_m, s] with `t = s^{p^N}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyRing {
    field: Field,
    vars: Vec<String>,
    depth: Option<u32>,
    base_scale: u64,
    order: MonomialOrder,
}

impl PolyRing {
    /// `depth = Some(N)` adjoins the base root variable `s = t^{1/p^N}`.
    pub fn new(field: Field, vars: Vec<String>, depth: Option<u32>) -> Result<Arc<Self>> {
        for (i, v) in vars.iter().enumerate() {
            let valid = v
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(Error::VariableMismatch(format!("invalid variable name {v:?}")));
            }
            if v == "t" || v == "g" {
                return Err(Error::VariableMismatch(format!(
                    "{v:?} is reserved (base variable / field generator)"
                )));
            }
            if vars[..i].contains(v) {
                return Err(Error::VariableMismatch(format!("duplicate variable {v:?}")));
            }
        }
        let base_scale = match depth {
            Some(n) => checked_pow(field.characteristic(), n)
                .filter(|&s| s < (1 << 40))
                .ok_or_else(|| Error::ExponentOverflow(format!("p^{n} is too large a depth")))?,
            None => 1,
        };
        let m = vars.len();
        let mut weights = vec![base_scale; m];
        if depth.is_some() {
            weights.push(1);
        }
        Ok(Arc::new(PolyRing {
            field,
            vars,
            depth,
            base_scale,
            order: MonomialOrder::Grevlex { weights },
        }))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn characteristic(&self) -> u64 {
        self.field.characteristic()
    }

    pub fn var_names(&self) -> &[String] {
        &self.vars
    }

    /// Number of fiber variables `x_i`.
    pub fn num_fiber_vars(&self) -> usize {
        self.vars.len()
    }

    /// Total number of ring variables, including `s`.
    pub fn nvars(&self) -> usize {
        self.vars.len() + usize::from(self.depth.is_some())
    }

    pub fn has_base(&self) -> bool {
        self.depth.is_some()
    }

    /// Index of `s` in exponent vectors.
    pub fn base_index(&self) -> Option<usize> {
        self.depth.map(|_| self.vars.len())
    }

    /// `N` with `s = t^{1/p^N}`.
    pub fn depth(&self) -> Option<u32> {
        self.depth
    }

    /// `p^N`: the `s`-exponent of `t`.
    pub fn base_scale(&self) -> u64 {
        self.base_scale
    }

    /// `s`-exponent granularity of level `j`, i.e. the `s`-exponent of
    /// `t^{1/p^j}`.
    pub fn level_step(&self, level: u32) -> Result<u64> {
        let depth = self.depth.ok_or_else(|| Error::precondition("ring has no base variable"))?;
        if level > depth {
            return Err(Error::DepthExhausted(format!("level {level} exceeds depth {depth}")));
        }
        Ok(checked_pow(self.characteristic(), depth - level).expect("bounded by base_scale"))
    }

    /// Default (weighted grevlex, `s` lowest) order.
    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn weights(&self) -> &[u64] {
        match &self.order {
            MonomialOrder::Grevlex { weights } => weights,
            _ => unreachable!("ring order is always graded"),
        }
    }

    /// Block order eliminating the variables flagged in `elim`.
    pub fn elimination_order(&self, elim: Vec<bool>) -> MonomialOrder {
        MonomialOrder::Block {
            elim,
            weights: self.weights().to_vec(),
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    // constructors

    pub fn zero(&self) -> Polynomial {
        Polynomial::zero()
    }

    pub fn one(&self) -> Polynomial {
        self.constant(self.field.one())
    }

    pub fn constant(&self, c: FieldElement) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: vec![(Monomial::one(self.nvars()), c)],
        }
    }

    pub fn int(&self, n: i64) -> Polynomial {
        self.constant(self.field.from_int(n))
    }

    pub fn monomial(&self, m: Monomial, c: FieldElement) -> Polynomial {
        assert_eq!(m.nvars(), self.nvars());
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial { terms: vec![(m, c)] }
    }

    /// The ring variable with index `i` (fiber variables first, then `s`).
    pub fn var(&self, i: usize) -> Polynomial {
        self.monomial(Monomial::var(self.nvars(), i, 1), self.field.one())
    }

    /// `s^a = t^{a/p^N}`.
    pub fn base_power(&self, a: u64) -> Result<Polynomial> {
        let idx = self.base_index().ok_or_else(|| Error::precondition("ring has no base variable"))?;
        Ok(self.monomial(Monomial::var(self.nvars(), idx, a), self.field.one()))
    }

    /// `t = s^{p^N}`.
    pub fn t(&self) -> Result<Polynomial> {
        self.base_power(self.base_scale)
    }

    /// Canonicalize an arbitrary term list.
    pub fn from_terms(&self, terms: impl IntoIterator<Item = (Monomial, FieldElement)>) -> Polynomial {
        let mut acc: HashMap<Monomial, FieldElement> = HashMap::new();
        for (m, c) in terms {
            debug_assert_eq!(m.nvars(), self.nvars());
            if c.is_zero() {
                continue;
            }
            let e = acc.entry(m).or_insert(FieldElement::ZERO);
            *e = self.field.add(*e, c);
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| self.order.cmp(&b.0, &a.0));
        Polynomial { terms }
    }

    fn check(&self, f: &Polynomial) -> Result<()> {
        match f.terms.first() {
            Some((m, _)) if m.nvars() != self.nvars() => Err(Error::VariableMismatch(format!(
                "polynomial has {} variables, ring has {}",
                m.nvars(),
                self.nvars()
            ))),
            _ => Ok(()),
        }
    }

    // arithmetic

    pub fn add(&self, f: &Polynomial, g: &Polynomial) -> Polynomial {
        let mut out = Vec::with_capacity(f.len() + g.len());
        let (mut i, mut j) = (0, 0);
        while i < f.terms.len() && j < g.terms.len() {
            let (mf, cf) = &f.terms[i];
            let (mg, cg) = &g.terms[j];
            match self.order.cmp(mf, mg) {
                std::cmp::Ordering::Greater => {
                    out.push((mf.clone(), *cf));
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push((mg.clone(), *cg));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = self.field.add(*cf, *cg);
                    if !c.is_zero() {
                        out.push((mf.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&f.terms[i..]);
        out.extend_from_slice(&g.terms[j..]);
        Polynomial { terms: out }
    }

    pub fn neg(&self, f: &Polynomial) -> Polynomial {
        Polynomial {
            terms: f
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), self.field.neg(*c)))
                .collect(),
        }
    }

    pub fn sub(&self, f: &Polynomial, g: &Polynomial) -> Polynomial {
        self.add(f, &self.neg(g))
    }

    pub fn scale(&self, f: &Polynomial, c: FieldElement) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: f
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), self.field.mul(*a, c)))
                .collect(),
        }
    }

    /// `c * m * f`. Multiplying by a monomial preserves the term order.
    pub fn mul_term(&self, f: &Polynomial, m: &Monomial, c: FieldElement) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: f
                .terms
                .iter()
                .map(|(fm, a)| (fm.mul(m), self.field.mul(*a, c)))
                .collect(),
        }
    }

    pub fn mul(&self, f: &Polynomial, g: &Polynomial) -> Polynomial {
        if f.is_zero() || g.is_zero() {
            return Polynomial::zero();
        }
        if f.len() == 1 {
            return self.mul_term(g, &f.terms[0].0, f.terms[0].1);
        }
        if g.len() == 1 {
            return self.mul_term(f, &g.terms[0].0, g.terms[0].1);
        }
        let mut acc: HashMap<Monomial, FieldElement> = HashMap::with_capacity(f.len() * g.len());
        for (mf, cf) in &f.terms {
            for (mg, cg) in &g.terms {
                let e = acc.entry(mf.mul(mg)).or_insert(FieldElement::ZERO);
                *e = self.field.add(*e, self.field.mul(*cf, *cg));
            }
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| self.order.cmp(&b.0, &a.0));
        Polynomial { terms }
    }

    /// `f^{p^j}`: coefficients go through Frobenius and exponents scale,
    /// using `(a + b)^p = a^p + b^p`.
    pub fn frobenius_power(&self, f: &Polynomial, j: u32) -> Result<Polynomial> {
        let q = checked_pow(self.characteristic(), j)
            .ok_or_else(|| Error::ExponentOverflow(format!("p^{j}")))?;
        let mut terms = Vec::with_capacity(f.len());
        for (m, c) in &f.terms {
            let mut exps = m.clone();
            for e in exps.0.iter_mut() {
                *e = e
                    .checked_mul(q)
                    .ok_or_else(|| Error::ExponentOverflow("exponent times p-power".into()))?;
            }
            terms.push((exps, self.field.frobenius(*c, j)));
        }
        // scaling all exponents by q preserves any weighted grevlex order
        Ok(Polynomial { terms })
    }

    /// `f^n` through the base-`p` digits of `n`:
    /// `f^n = prod_i (f^{d_i})^{p^i}`.
    pub fn pow(&self, f: &Polynomial, n: u64) -> Result<Polynomial> {
        if n == 0 {
            return Ok(self.one());
        }
        if f.is_zero() {
            return Ok(Polynomial::zero());
        }
        let p = self.characteristic();
        let mut acc = self.one();
        let mut rest = n;
        let mut j = 0u32;
        while rest > 0 {
            let digit = rest % p;
            rest /= p;
            if digit > 0 {
                let mut small = f.clone();
                for _ in 1..digit {
                    small = self.mul(&small, f);
                }
                let lifted = self.frobenius_power(&small, j)?;
                acc = self.mul(&acc, &lifted);
            }
            j += 1;
        }
        Ok(acc)
    }

    /// Evaluate `f` at `images` (one polynomial of `target` per variable of
    /// `self`). Constant and single-variable images take fast paths.
    pub fn eval_hom(&self, f: &Polynomial, target: &PolyRing, images: &[Polynomial]) -> Result<Polynomial> {
        self.check(f)?;
        if images.len() != self.nvars() {
            return Err(Error::VariableMismatch(format!(
                "{} images for {} variables",
                images.len(),
                self.nvars()
            )));
        }
        enum Image<'a> {
            Constant(FieldElement),
            Var(usize, FieldElement),
            General(&'a Polynomial),
        }
        let kinds: Vec<Image> = images
            .iter()
            .map(|g| {
                if g.is_zero() {
                    Image::Constant(FieldElement::ZERO)
                } else if g.is_constant() {
                    Image::Constant(g.terms[0].1)
                } else if g.len() == 1 && g.terms[0].0.0.iter().sum::<u64>() == 1 {
                    let idx = g.terms[0].0.0.iter().position(|&e| e == 1).unwrap();
                    Image::Var(idx, g.terms[0].1)
                } else {
                    Image::General(g)
                }
            })
            .collect();
        let mut out = Vec::new();
        let mut general_parts: Vec<Polynomial> = Vec::new();
        let tn = target.nvars();
        for (m, c) in &f.terms {
            let mut coeff = *c;
            let mut mono = Monomial::one(tn);
            let mut rest = target.one();
            let mut has_general = false;
            for (v, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match &kinds[v] {
                    Image::Constant(a) => coeff = self.field.mul(coeff, self.field.pow(*a, e)),
                    Image::Var(idx, a) => {
                        mono.0[*idx] += e;
                        coeff = self.field.mul(coeff, self.field.pow(*a, e));
                    }
                    Image::General(g) => {
                        rest = target.mul(&rest, &target.pow(g, e)?);
                        has_general = true;
                    }
                }
                if coeff.is_zero() {
                    break;
                }
            }
            if coeff.is_zero() {
                continue;
            }
            if has_general {
                general_parts.push(target.mul_term(&rest, &mono, coeff));
            } else {
                out.push((mono, coeff));
            }
        }
        let mut result = target.from_terms(out);
        for part in general_parts {
            result = target.add(&result, &part);
        }
        Ok(result)
    }

    /// Substitute some variables within the same ring; `None` keeps the
    /// variable.
    pub fn substitute(&self, f: &Polynomial, assignments: &[Option<Polynomial>]) -> Result<Polynomial> {
        let images: Vec<Polynomial> = (0..self.nvars())
            .map(|i| match assignments.get(i).cloned().flatten() {
                Some(g) => g,
                None => self.var(i),
            })
            .collect();
        self.eval_hom(f, self, &images)
    }

    /// Formal derivative in a fiber variable.
    pub fn partial_derivative(&self, f: &Polynomial, var: usize) -> Result<Polynomial> {
        if Some(var) == self.base_index() {
            return Err(Error::BaseDerivative);
        }
        if var >= self.nvars() {
            return Err(Error::VariableMismatch(format!("no variable with index {var}")));
        }
        let terms = f.terms.iter().filter(|(m, _)| m.0[var] > 0).map(|(m, c)| {
            let e = m.0[var];
            let mut m2 = m.clone();
            m2.0[var] -= 1;
            (m2, self.field.mul(*c, self.field.from_int((e % self.characteristic()) as i64)))
        });
        Ok(self.from_terms(terms))
    }

    /// `d/dt` of a polynomial that genuinely lives in F_{p^k}[x, t]
    /// (every `s`-exponent divisible by `p^N`).
    pub fn partial_t(&self, f: &Polynomial) -> Result<Polynomial> {
        let b = self.base_index().ok_or_else(|| Error::precondition("ring has no base variable"))?;
        let scale = self.base_scale;
        let mut terms = Vec::new();
        for (m, c) in &f.terms {
            let e = m.0[b];
            if e % scale != 0 {
                return Err(Error::BaseDerivative);
            }
            let te = e / scale;
            if te == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[b] -= scale;
            terms.push((m2, self.field.mul(*c, self.field.from_int((te % self.characteristic()) as i64))));
        }
        Ok(self.from_terms(terms))
    }

    /// Exact quotient `f / g`, or `None` if `g` does not divide `f`.
    pub fn div_exact(&self, f: &Polynomial, g: &Polynomial) -> Option<Polynomial> {
        let (lm, lc) = g.terms.first()?;
        let lc_inv = self.field.inv(*lc).ok()?;
        let mut rem = f.clone();
        let mut quotient = Vec::new();
        while let Some((m, c)) = rem.terms.first().cloned() {
            if !lm.divides(&m) {
                return None;
            }
            let qm = lm.quotient_of(&m);
            let qc = self.field.mul(c, lc_inv);
            rem = self.sub(&rem, &self.mul_term(g, &qm, qc));
            quotient.push((qm, qc));
        }
        Some(self.from_terms(quotient))
    }

    /// Scale to leading coefficient one.
    pub fn monic(&self, f: &Polynomial) -> Polynomial {
        match f.leading_coefficient() {
            Some(c) => self.scale(f, self.field.inv(c).expect("nonzero leading coefficient")),
            None => Polynomial::zero(),
        }
    }

    /// Smallest level `j` with `f` in F_{p^k}[x, t^{1/p^j}]: every
    /// `s`-exponent is divisible by `p^{N-j}`.
    pub fn level_of(&self, f: &Polynomial) -> u32 {
        let (Some(b), Some(depth)) = (self.base_index(), self.depth) else {
            return 0;
        };
        let p = self.characteristic();
        (0..=depth)
            .find(|&j| {
                let step = checked_pow(p, depth - j).unwrap();
                f.terms.iter().all(|(m, _)| m.0[b] % step == 0)
            })
            .unwrap_or(depth)
    }

    /// The same polynomial in a ring with the same variables and a
    /// different depth (`s`-exponents rescaled). Fails when an exponent does
    /// not survive the rescaling.
    pub fn rescale_into(&self, f: &Polynomial, target: &PolyRing) -> Result<Polynomial> {
        if self.vars != target.vars || self.has_base() != target.has_base() {
            return Err(Error::VariableMismatch("rings differ in variables".into()));
        }
        let Some(b) = self.base_index() else {
            return Ok(target.from_terms(f.terms.iter().cloned()));
        };
        let (from, to) = (self.base_scale as u128, target.base_scale as u128);
        let mut terms = Vec::with_capacity(f.len());
        for (m, c) in &f.terms {
            let num = m.0[b] as u128 * to;
            if !num.is_multiple_of(from) {
                return Err(Error::DepthExhausted(format!(
                    "t^({}/{}) is not defined at depth {:?}",
                    m.0[b], from, target.depth
                )));
            }
            let mut m2 = m.clone();
            m2.0[b] = (num / from) as u64;
            terms.push((m2, *c));
        }
        Ok(target.from_terms(terms))
    }
}
