use std::cmp::Ordering;

use smallvec::SmallVec;

/// Exponent vector. Variables are indexed in ring order: the fiber
/// variables first, then the base root variable `s` when present.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub(crate) SmallVec<[u64; 4]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn from_exponents(exps: &[u64]) -> Self {
        Monomial(SmallVec::from_slice(exps))
    }

    pub fn var(nvars: usize, index: usize, exp: u64) -> Self {
        let mut m = Self::one(nvars);
        m.0[index] = exp;
        m
    }

    pub fn exponents(&self) -> &[u64] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self | other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }
}

/// Monomial orders used by the Gröbner kernel.
///
/// Graded orders carry a positive weight per variable. Rings with a base
/// root variable `s = t^{1/p^N}` weight the fiber variables by `p^N` and `s`
/// by 1, so `t` has the same weight as a fiber variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonomialOrder {
    Lex,
    Grevlex { weights: Vec<u64> },
    /// Variables flagged in `elim` are compared first (weighted grevlex on
    /// that block), ties broken by weighted grevlex on the rest. Every
    /// monomial involving an eliminated variable exceeds every monomial
    /// that does not.
    Block { elim: Vec<bool>, weights: Vec<u64> },
}

impl MonomialOrder {
    pub fn grevlex(nvars: usize) -> Self {
        MonomialOrder::Grevlex {
            weights: vec![1; nvars],
        }
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Lex => a.0.cmp(&b.0),
            MonomialOrder::Grevlex { weights } => grevlex_on(a, b, weights, |_| true),
            MonomialOrder::Block { elim, weights } => {
                grevlex_on(a, b, weights, |i| elim[i]).then_with(|| grevlex_on(a, b, weights, |i| !elim[i]))
            }
        }
    }

    /// The same order on a ring with one extra variable prepended, which
    /// is placed in its own top elimination block.
    pub(crate) fn with_leading_elim_var(&self) -> MonomialOrder {
        let (mut elim, weights) = match self {
            MonomialOrder::Block { elim, weights } => (elim.clone(), weights.clone()),
            MonomialOrder::Grevlex { weights } => (vec![false; weights.len()], weights.clone()),
            MonomialOrder::Lex => panic!("elimination block over lex is not supported"),
        };
        let mut w = vec![1];
        w.extend(weights);
        elim.insert(0, true);
        MonomialOrder::Block { elim, weights: w }
    }
}

fn grevlex_on(a: &Monomial, b: &Monomial, weights: &[u64], select: impl Fn(usize) -> bool) -> Ordering {
    let n = a.0.len();
    let mut da = 0u128;
    let mut db = 0u128;
    for i in 0..n {
        if select(i) {
            da += a.0[i] as u128 * weights[i] as u128;
            db += b.0[i] as u128 * weights[i] as u128;
        }
    }
    match da.cmp(&db) {
        Ordering::Equal => {}
        ord => return ord,
    }
    for i in (0..n).rev() {
        if select(i) && a.0[i] != b.0[i] {
            return b.0[i].cmp(&a.0[i]);
        }
    }
    Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u64]) -> Monomial {
        Monomial::from_exponents(e)
    }

    #[test]
    fn grevlex_basics() {
        let o = MonomialOrder::grevlex(3);
        // x > y > z in degree one
        assert_eq!(o.cmp(&m(&[1, 0, 0]), &m(&[0, 1, 0])), Ordering::Greater);
        assert_eq!(o.cmp(&m(&[0, 1, 0]), &m(&[0, 0, 1])), Ordering::Greater);
        // x*z < y^2 in grevlex
        assert_eq!(o.cmp(&m(&[1, 0, 1]), &m(&[0, 2, 0])), Ordering::Less);
        // degree first
        assert_eq!(o.cmp(&m(&[0, 0, 2]), &m(&[1, 0, 0])), Ordering::Greater);
    }

    #[test]
    fn weights_put_base_root_on_the_t_scale() {
        // ring x, s with s = t^{1/9}: weights [9, 1]
        let o = MonomialOrder::Grevlex { weights: vec![9, 1] };
        // x^4 > x^3 * s^9 (= x^3 t^{1/9})
        assert_eq!(o.cmp(&m(&[4, 0]), &m(&[3, 9])), Ordering::Greater);
        // s^9 (= t) vs x: same weight, s is last so x^1 wins
        assert_eq!(o.cmp(&m(&[1, 0]), &m(&[0, 9])), Ordering::Greater);
    }

    #[test]
    fn block_order_eliminates() {
        let o = MonomialOrder::Block {
            elim: vec![true, false, false],
            weights: vec![1, 1, 1],
        };
        assert_eq!(o.cmp(&m(&[1, 0, 0]), &m(&[0, 5, 5])), Ordering::Greater);
        assert_eq!(o.cmp(&m(&[0, 2, 0]), &m(&[0, 1, 0])), Ordering::Greater);
    }

    #[test]
    fn divisibility_helpers() {
        let a = m(&[1, 2, 0]);
        let b = m(&[2, 2, 1]);
        assert!(a.divides(&b));
        assert!(!b.divides(&a));
        assert_eq!(a.quotient_of(&b), m(&[1, 0, 1]));
        assert_eq!(a.lcm(&m(&[0, 3, 1])), m(&[1, 3, 1]));
        assert!(m(&[1, 0]).coprime(&m(&[0, 4])));
    }
}
