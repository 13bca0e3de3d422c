//! Buchberger's algorithm with the Gebauer–Möller pair criteria.
//!
//! The kernel works on raw term lists sorted under an arbitrary
//! [`MonomialOrder`], so callers may add auxiliary variables (for
//! intersections) or switch to elimination orders without building a new
//! [`PolyRing`](crate::poly::PolyRing). Results are converted back to the
//! ring's canonical term order by the caller.
//!
//! The pair schedule is sequential and fully deterministic; the reduced
//! basis is unique for a fixed order anyway.

use std::cmp::Ordering;

use crate::field::{Field, FieldElement};
use crate::monomial::{Monomial, MonomialOrder};

pub(crate) type Terms = Vec<(Monomial, FieldElement)>;

struct Kernel<'a> {
    field: &'a Field,
    order: &'a MonomialOrder,
}

#[derive(Clone)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

impl Kernel<'_> {
    fn sort(&self, terms: &mut Terms) {
        terms.sort_by(|a, b| self.order.cmp(&b.0, &a.0));
    }

    fn monic(&self, f: &mut Terms) {
        if let Some(&(_, lc)) = f.first() {
            if lc != FieldElement::ONE {
                let inv = self.field.inv(lc).expect("nonzero");
                for (_, c) in f.iter_mut() {
                    *c = self.field.mul(*c, inv);
                }
            }
        }
    }

    /// `a[from..] - c * m * b[1..]`, where the leading terms are known to
    /// cancel.
    fn sub_mul_tail(&self, a: &[(Monomial, FieldElement)], b: &Terms, m: &Monomial, c: FieldElement) -> Terms {
        let neg_c = self.field.neg(c);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut bi = b[1..].iter().map(|(bm, bc)| (bm.mul(m), self.field.mul(*bc, neg_c))).peekable();
        let mut ai = a.iter().peekable();
        loop {
            match (ai.peek(), bi.peek()) {
                (Some((am, ac)), Some((bm, bc))) => match self.order.cmp(am, bm) {
                    Ordering::Greater => {
                        out.push((am.clone(), *ac));
                        ai.next();
                    }
                    Ordering::Less => {
                        out.push(bi.next().unwrap());
                    }
                    Ordering::Equal => {
                        let s = self.field.add(*ac, *bc);
                        if !s.is_zero() {
                            out.push((am.clone(), s));
                        }
                        ai.next();
                        bi.next();
                    }
                },
                (Some(_), None) => {
                    out.extend(ai.cloned());
                    break;
                }
                (None, Some(_)) => {
                    out.extend(bi);
                    break;
                }
                (None, None) => break,
            }
        }
        out
    }

    fn find_divisor(&self, m: &Monomial, basis: &[Terms], active: &[usize]) -> Option<usize> {
        active.iter().copied().find(|&k| basis[k][0].0.divides(m))
    }

    /// Full reduction of `f` by the monic polynomials `basis[active]`.
    fn reduce(&self, f: Terms, basis: &[Terms], active: &[usize]) -> Terms {
        let mut rem: Terms = Vec::new();
        let mut cur = f;
        let mut start = 0;
        while start < cur.len() {
            let (m, c) = cur[start].clone();
            match self.find_divisor(&m, basis, active) {
                Some(k) => {
                    let g = &basis[k];
                    let q = g[0].0.quotient_of(&m);
                    cur = self.sub_mul_tail(&cur[start + 1..], g, &q, c);
                    start = 0;
                }
                None => {
                    rem.push((m, c));
                    start += 1;
                }
            }
        }
        rem
    }

    fn spoly(&self, f: &Terms, g: &Terms, lcm: &Monomial) -> Terms {
        let mf = f[0].0.quotient_of(lcm);
        let mg = g[0].0.quotient_of(lcm);
        let scaled: Terms = f[1..].iter().map(|(m, c)| (m.mul(&mf), *c)).collect();
        // f and g are monic: S = mf*f - mg*g and the leading terms cancel
        self.sub_mul_tail(&scaled, g, &mg, FieldElement::ONE)
    }

    /// Gebauer–Möller update for a new basis element `h`.
    fn update(&self, basis: &[Terms], active: &mut Vec<usize>, pairs: &mut Vec<Pair>, h: usize) {
        let lh = &basis[h][0].0;
        let candidates: Vec<Pair> = active
            .iter()
            .map(|&g| Pair {
                i: g,
                j: h,
                lcm: basis[g][0].0.lcm(lh),
            })
            .collect();
        // chain criterion among the new pairs
        let mut kept: Vec<(Pair, bool)> = Vec::new();
        for (idx, c) in candidates.iter().enumerate() {
            let coprime = basis[c.i][0].0.coprime(lh);
            let dominated = !coprime
                && (candidates[idx + 1..].iter().any(|o| o.lcm.divides(&c.lcm))
                    || kept.iter().any(|(o, _)| o.lcm.divides(&c.lcm)));
            if !dominated {
                kept.push((c.clone(), coprime));
            }
        }
        // drop old pairs whose lcm is strictly reached through h
        pairs.retain(|p| {
            !(lh.divides(&p.lcm)
                && basis[p.i][0].0.lcm(lh) != p.lcm
                && basis[p.j][0].0.lcm(lh) != p.lcm)
        });
        for (p, coprime) in kept {
            if !coprime {
                pairs.push(p);
            }
        }
        active.retain(|&g| !lh.divides(&basis[g][0].0));
        active.push(h);
    }

    fn pair_cmp(&self, a: &Pair, b: &Pair) -> Ordering {
        self.order
            .cmp(&a.lcm, &b.lcm)
            .then_with(|| (a.j, a.i).cmp(&(b.j, b.i)))
    }

    fn groebner(&self, input: Vec<Terms>) -> Vec<Terms> {
        let mut inputs: Vec<Terms> = input
            .into_iter()
            .filter(|f| !f.is_empty())
            .map(|mut f| {
                self.sort(&mut f);
                self.monic(&mut f);
                f
            })
            .collect();
        if let Some(unit) = inputs.iter().find(|f| f[0].0.is_one()) {
            return vec![vec![(unit[0].0.clone(), FieldElement::ONE)]];
        }
        // smallest leading terms first keeps the intermediate bases small
        inputs.sort_by(|a, b| self.order.cmp(&a[0].0, &b[0].0).then_with(|| a.len().cmp(&b.len())));
        inputs.dedup();

        let mut basis: Vec<Terms> = Vec::new();
        let mut active: Vec<usize> = Vec::new();
        let mut pairs: Vec<Pair> = Vec::new();

        for f in inputs {
            let mut r = self.reduce(f, &basis, &active);
            if r.is_empty() {
                continue;
            }
            self.monic(&mut r);
            if r[0].0.is_one() {
                return vec![r];
            }
            basis.push(r);
            let h = basis.len() - 1;
            self.update(&basis, &mut active, &mut pairs, h);
        }

        loop {
            // process the pair with the smallest lcm
            let Some(best) = (0..pairs.len()).min_by(|&a, &b| self.pair_cmp(&pairs[a], &pairs[b])) else {
                break;
            };
            let pair = pairs.swap_remove(best);
            let s = self.spoly(&basis[pair.i], &basis[pair.j], &pair.lcm);
            let mut r = self.reduce(s, &basis, &active);
            if r.is_empty() {
                continue;
            }
            self.monic(&mut r);
            if r[0].0.is_one() {
                return vec![r];
            }
            basis.push(r);
            let h = basis.len() - 1;
            self.update(&basis, &mut active, &mut pairs, h);
        }

        // `active` is a minimal basis; inter-reduce the tails
        let mut minimal: Vec<Terms> = active.iter().map(|&k| basis[k].clone()).collect();
        minimal.sort_by(|a, b| self.order.cmp(&b[0].0, &a[0].0));
        let all: Vec<usize> = (0..minimal.len()).collect();
        let mut reduced = Vec::with_capacity(minimal.len());
        for k in 0..minimal.len() {
            let others: Vec<usize> = all.iter().copied().filter(|&o| o != k).collect();
            let head = minimal[k][0].clone();
            let tail = self.reduce(minimal[k][1..].to_vec(), &minimal, &others);
            let mut g = vec![head];
            g.extend(tail);
            reduced.push(g);
        }
        reduced
    }
}

/// Reduced Gröbner basis of the ideal generated by `gens`, sorted by
/// leading monomial, descending. Each element is monic and its terms are
/// sorted descending under `order`.
pub(crate) fn reduced_basis(field: &Field, order: &MonomialOrder, gens: Vec<Terms>) -> Vec<Terms> {
    Kernel { field, order }.groebner(gens)
}

/// Normal form of `f` modulo a Gröbner basis `gb` (both under `order`).
pub(crate) fn normal_form(field: &Field, order: &MonomialOrder, f: Terms, gb: &[Terms]) -> Terms {
    let k = Kernel { field, order };
    let mut f = f;
    k.sort(&mut f);
    let all: Vec<usize> = (0..gb.len()).collect();
    k.reduce(f, gb, &all)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(terms: &[(&[u64], i64)], f: &Field) -> Terms {
        terms
            .iter()
            .map(|(e, c)| (Monomial::from_exponents(e), f.from_int(*c)))
            .collect()
    }

    #[test]
    fn unit_ideal() {
        let f = Field::prime(5).unwrap();
        let o = MonomialOrder::grevlex(1);
        let gb = reduced_basis(&f, &o, vec![t(&[(&[1], 1), (&[0], 1)], &f), t(&[(&[1], 1)], &f)]);
        assert_eq!(gb, vec![t(&[(&[0], 1)], &f)]);
    }

    #[test]
    fn already_a_basis() {
        // <x - y, y^2> under lex x > y
        let f = Field::prime(7).unwrap();
        let gb = reduced_basis(
            &f,
            &MonomialOrder::Lex,
            vec![t(&[(&[1, 0], 1), (&[0, 1], -1)], &f), t(&[(&[0, 2], 1)], &f)],
        );
        assert_eq!(gb, vec![t(&[(&[1, 0], 1), (&[0, 1], -1)], &f), t(&[(&[0, 2], 1)], &f)]);
    }

    #[test]
    fn twisted_cubic_elimination() {
        // <y - x^2, z - x^3> under lex x > y > z contains z^2 - y^3
        let f = Field::prime(101).unwrap();
        let gb = reduced_basis(
            &f,
            &MonomialOrder::Lex,
            vec![
                t(&[(&[0, 1, 0], 1), (&[2, 0, 0], -1)], &f),
                t(&[(&[0, 0, 1], 1), (&[3, 0, 0], -1)], &f),
            ],
        );
        let target = t(&[(&[0, 3, 0], 1), (&[0, 0, 2], -1)], &f);
        assert!(gb.contains(&target), "{gb:?}");
        // and the substitution y = x^2, z = x^3 kills it
        assert!(normal_form(&f, &MonomialOrder::Lex, target, &gb).is_empty());
    }

    #[test]
    fn normal_form_examples() {
        let f = Field::prime(3).unwrap();
        let o = MonomialOrder::grevlex(2);
        // x^2 y mod <x^2 - y> = y^2
        let gb = reduced_basis(&f, &o, vec![t(&[(&[2, 0], 1), (&[0, 1], -1)], &f)]);
        let nf = normal_form(&f, &o, t(&[(&[2, 1], 1)], &f), &gb);
        assert_eq!(nf, t(&[(&[0, 2], 1)], &f));
        // f mod <0> = f
        let g = t(&[(&[2, 1], 1), (&[0, 1], 2)], &f);
        assert_eq!(normal_form(&f, &o, g.clone(), &[]), g);
        // x^7 mod <x> = 0
        let gbx = reduced_basis(&f, &o, vec![t(&[(&[1, 0], 1)], &f)]);
        assert!(normal_form(&f, &o, t(&[(&[7, 0], 1)], &f), &gbx).is_empty());
    }
}
