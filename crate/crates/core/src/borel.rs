//! Normal-form arithmetic in the Borel subgroup B = Q:H of ²G₂(q) and its
//! extension B:⟨φ⟩ by the field automorphism.
//!
//! Q = {X(t,u,v)} is the unipotent radical with the product
//!
//!   X(t₁,u₁,v₁)·X(t₂,u₂,v₂)
//!     = X(t₁+t₂, u₁+u₂ − t₁t₂^{3θ}, v₁+v₂ − t₂u₁ + t₁t₂^{3θ+1} − t₁²t₂^{3θ}),
//!
//! H = {h(s) : s ≠ 0} acts by X(t,u,v)^{h(s)} = X(s^{3θ−2}t, s^{1−3θ}u, s^{−1}v),
//! and φ cubes every coordinate. Every element of B:⟨φ⟩ has the unique normal
//! form X(t,u,v)·h(s)·φ^j with s ≠ 0 and 0 ≤ j < m, so equality is
//! componentwise.

use crate::gf3m::{gcd, FieldCtx, FieldError, Fq};
use std::collections::HashSet;

/// X(t,u,v) ∈ Q. Any coordinate triple is a valid element; |Q| = q³.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Unipotent {
    pub t: Fq,
    pub u: Fq,
    pub v: Fq,
}

/// X(t,u,v)·h(s)·φ^j ∈ B:⟨φ⟩ in normal form.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct GroupElt {
    pub x: Unipotent,
    pub s: Fq,
    pub j: usize,
}

/// Group operations over a fixed field context.
#[derive(Clone, Copy)]
pub struct Borel<'f> {
    pub f: &'f FieldCtx,
}

impl<'f> Borel<'f> {
    pub fn new(f: &'f FieldCtx) -> Self {
        Borel { f }
    }

    // -- constructors -------------------------------------------------------

    pub fn uni(&self, t: Fq, u: Fq, v: Fq) -> Unipotent {
        Unipotent { t, u, v }
    }

    pub fn uni_identity(&self) -> Unipotent {
        let z = self.f.zero();
        Unipotent { t: z, u: z, v: z }
    }

    /// h(s), s ≠ 0.
    pub fn h(&self, s: Fq) -> GroupElt {
        assert!(!self.f.is_zero(s), "torus coordinate must be nonzero");
        GroupElt {
            x: self.uni_identity(),
            s,
            j: 0,
        }
    }

    pub fn phi(&self, j: usize) -> GroupElt {
        GroupElt {
            x: self.uni_identity(),
            s: self.f.one(),
            j: j % self.f.m(),
        }
    }

    pub fn elt(&self, x: Unipotent, s: Fq, j: usize) -> GroupElt {
        assert!(!self.f.is_zero(s), "torus coordinate must be nonzero");
        GroupElt {
            x,
            s,
            j: j % self.f.m(),
        }
    }

    pub fn from_uni(&self, x: Unipotent) -> GroupElt {
        GroupElt {
            x,
            s: self.f.one(),
            j: 0,
        }
    }

    pub fn identity(&self) -> GroupElt {
        self.from_uni(self.uni_identity())
    }

    pub fn is_identity(&self, a: GroupElt) -> bool {
        a == self.identity()
    }

    // -- unipotent operations -------------------------------------------------

    pub fn uni_mul(&self, a: Unipotent, b: Unipotent) -> Unipotent {
        let f = self.f;
        let b3t = f.three_theta(b.t);
        let t = f.add(a.t, b.t);
        let u = f.sub(f.add(a.u, b.u), f.mul(a.t, b3t));
        // v₁ + v₂ − t₂u₁ + t₁t₂^{3θ+1} − t₁²t₂^{3θ}
        let v = f.add(
            f.sub(f.add(a.v, b.v), f.mul(b.t, a.u)),
            f.sub(f.mul(a.t, f.mul(b3t, b.t)), f.mul(f.sq(a.t), b3t)),
        );
        Unipotent { t, u, v }
    }

    pub fn uni_inv(&self, a: Unipotent) -> Unipotent {
        let f = self.f;
        let t3t1 = f.pow_3t_plus_1(a.t);
        let t3t2 = f.pow_3t_plus_2(a.t);
        Unipotent {
            t: f.neg(a.t),
            u: f.neg(f.add(a.u, t3t1)),
            v: f.add(f.neg(f.add(a.v, f.mul(a.t, a.u))), t3t2),
        }
    }

    pub fn uni_pow(&self, a: Unipotent, k: i64) -> Unipotent {
        let (mut base, mut e) = if k < 0 {
            (self.uni_inv(a), (-(k as i128)) as u64)
        } else {
            (a, k as u64)
        };
        let mut r = self.uni_identity();
        while e > 0 {
            if e & 1 == 1 {
                r = self.uni_mul(r, base);
            }
            base = self.uni_mul(base, base);
            e >>= 1;
        }
        r
    }

    /// The closed form for a^{X(t',u',v')} = g⁻¹·a·g.
    pub fn uni_conj(&self, a: Unipotent, g: Unipotent) -> Unipotent {
        let f = self.f;
        let (t, u, v) = (a.t, a.u, a.v);
        let (tp, up) = (g.t, g.u);
        let t3t = f.three_theta(t);
        let tp3t = f.three_theta(tp);
        let new_u = f.add(f.sub(u, f.mul(t, tp3t)), f.mul(tp, t3t));
        // v − t'u + tu' + t·t'^{3θ+1} − t'·t^{3θ+1} − t²t'^{3θ} + t'²t^{3θ}
        let mut new_v = f.sub(v, f.mul(tp, u));
        new_v = f.add(new_v, f.mul(t, up));
        new_v = f.add(new_v, f.mul(t, f.mul(tp3t, tp)));
        new_v = f.sub(new_v, f.mul(tp, f.mul(t3t, t)));
        new_v = f.sub(new_v, f.mul(f.sq(t), tp3t));
        new_v = f.add(new_v, f.mul(f.sq(tp), t3t));
        Unipotent {
            t,
            u: new_u,
            v: new_v,
        }
    }

    /// The closed form for [g, a⁻¹] = g⁻¹·a·g·a⁻¹; always lands in Q' = {t = 0}.
    pub fn uni_comm(&self, g: Unipotent, a: Unipotent) -> Unipotent {
        let f = self.f;
        let (t, u) = (a.t, a.u);
        let (tp, up) = (g.t, g.u);
        let t3t = f.three_theta(t);
        let tp3t = f.three_theta(tp);
        let new_u = f.add(f.neg(f.mul(t, tp3t)), f.mul(tp, t3t));
        // −t'u + tu' + t·t'^{3θ+1} + t²t'^{3θ} + t'²t^{3θ}
        let mut new_v = f.add(f.neg(f.mul(tp, u)), f.mul(t, up));
        new_v = f.add(new_v, f.mul(t, f.mul(tp3t, tp)));
        new_v = f.add(new_v, f.mul(f.sq(t), tp3t));
        new_v = f.add(new_v, f.mul(f.sq(tp), t3t));
        Unipotent {
            t: f.zero(),
            u: new_u,
            v: new_v,
        }
    }

    /// a^{h(s)} = X(s^{3θ−2}t, s^{1−3θ}u, s^{−1}v), s ≠ 0.
    pub fn torus_act(&self, a: Unipotent, s: Fq) -> Unipotent {
        let sinv = self.f.inv(s).expect("torus scalar is nonzero");
        self.torus_act_pair(a, s, sinv)
    }

    /// Torus action with the inverse already in hand: all three coefficients
    /// come from (s, s⁻¹) without further inversions.
    #[inline]
    fn torus_act_pair(&self, a: Unipotent, s: Fq, sinv: Fq) -> Unipotent {
        let f = self.f;
        if s == f.one() {
            return a;
        }
        let c_t = f.mul(f.three_theta(s), f.sq(sinv)); // s^{3θ−2}
        let c_u = f.mul(s, f.three_theta(sinv)); // s^{1−3θ}
        Unipotent {
            t: if f.is_zero(a.t) { a.t } else { f.mul(c_t, a.t) },
            u: if f.is_zero(a.u) { a.u } else { f.mul(c_u, a.u) },
            v: if f.is_zero(a.v) { a.v } else { f.mul(sinv, a.v) },
        }
    }

    /// Coordinate-wise k-fold cubing, the action of φ^k on Q.
    pub fn uni_frob(&self, a: Unipotent, k: usize) -> Unipotent {
        let f = self.f;
        Unipotent {
            t: f.frobenius(a.t, k),
            u: f.frobenius(a.u, k),
            v: f.frobenius(a.v, k),
        }
    }

    pub fn uni_order(&self, a: Unipotent) -> u64 {
        let f = self.f;
        if !f.is_zero(a.t) {
            9
        } else if !f.is_zero(a.u) || !f.is_zero(a.v) {
            3
        } else {
            1
        }
    }

    pub fn in_derived(&self, a: Unipotent) -> bool {
        self.f.is_zero(a.t)
    }

    pub fn in_center(&self, a: Unipotent) -> bool {
        self.f.is_zero(a.t) && self.f.is_zero(a.u)
    }

    // -- full normal-form operations -------------------------------------------

    /// Moving φ^j across X·h cubes their coordinates j times; moving h(s)
    /// across X twists by the torus action at s^{-1}.
    /// Torus inversion; ±1 are their own inverses, which covers the sweeps.
    #[inline]
    fn torus_inv(&self, s: Fq) -> Fq {
        let f = self.f;
        if s == f.one() || s == f.scalar(2) {
            s
        } else {
            f.inv(s).expect("torus coordinate is nonzero")
        }
    }

    pub fn mul(&self, a: GroupElt, b: GroupElt) -> GroupElt {
        let f = self.f;
        let one = f.one();
        let j = (a.j + b.j) % f.m();
        let s = if b.s == one {
            a.s
        } else {
            f.mul(a.s, f.frobenius(b.s, a.j))
        };
        // a pure torus-φ right factor leaves the unipotent part alone
        if b.x == self.uni_identity() {
            return GroupElt { x: a.x, s, j };
        }
        let bx = self.uni_frob(b.x, a.j);
        let twisted = if a.s == one {
            bx
        } else {
            self.torus_act_pair(bx, self.torus_inv(a.s), a.s)
        };
        GroupElt {
            x: self.uni_mul(a.x, twisted),
            s,
            j,
        }
    }

    pub fn inv(&self, a: GroupElt) -> GroupElt {
        let f = self.f;
        let jinv = (f.m() - a.j) % f.m();
        // s₁ = (s^{-1})^{3^{jinv}}; its own inverse is s^{3^{jinv}}
        let sinv = self.torus_inv(a.s);
        let s1 = f.frobenius(sinv, jinv);
        let s1inv = f.frobenius(a.s, jinv);
        let x1 = self.uni_frob(self.uni_inv(a.x), jinv);
        GroupElt {
            x: self.torus_act_pair(x1, s1inv, s1),
            s: s1,
            j: jinv,
        }
    }

    /// g⁻¹·a·g.
    pub fn conj(&self, a: GroupElt, g: GroupElt) -> GroupElt {
        self.mul(self.mul(self.inv(g), a), g)
    }

    pub fn pow(&self, a: GroupElt, k: i64) -> GroupElt {
        let (mut base, mut e) = if k < 0 {
            (self.inv(a), (-(k as i128)) as u64)
        } else {
            (a, k as u64)
        };
        let mut r = self.identity();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        r
    }

    /// Exact element order, via the tower B:⟨φ⟩ → ⟨φ⟩ and B → H: the order is
    /// (order of the φ-part) × (torus order of the residue) × (unipotent order
    /// of what remains).
    pub fn order(&self, a: GroupElt) -> u64 {
        let f = self.f;
        let k1 = (f.m() / gcd(f.m(), a.j)) as u64;
        let b = self.pow(a, k1 as i64);
        debug_assert_eq!(b.j, 0);
        let k2 = f.mult_order(b.s).expect("torus coordinate is nonzero");
        let c = self.pow(b, k2 as i64);
        debug_assert_eq!(c.j, 0);
        debug_assert_eq!(c.s, f.one());
        k1 * k2 * self.uni_order(c.x)
    }

    /// Commuting 3-part / 3'-part decomposition a = a₃·a₃' via the idempotent
    /// exponents of the Chinese remainder split of ⟨a⟩.
    pub fn hall_decompose(&self, a: GroupElt) -> (GroupElt, GroupElt) {
        let n = self.order(a);
        let mut three_part = 1u64;
        let mut rest = n;
        while rest % 3 == 0 {
            three_part *= 3;
            rest /= 3;
        }
        if three_part == 1 {
            return (self.identity(), a);
        }
        if rest == 1 {
            return (a, self.identity());
        }
        // e ≡ 1 mod 3^α, e ≡ 0 mod n'; f = 1 + n − e mod n
        let e = (0..three_part)
            .map(|k| k * rest)
            .find(|&e| e % three_part == 1)
            .expect("CRT idempotent exists");
        let fexp = (1 + n - e % n) % n;
        let a3 = self.pow(a, e as i64);
        let a3p = self.pow(a, fexp as i64);
        debug_assert_eq!(self.mul(a3, a3p), a);
        debug_assert_eq!(self.mul(a3p, a3), a);
        (a3, a3p)
    }

    /// Breadth-first closure of a generating set under multiplication and
    /// inversion, in deterministic insertion order. Errors if the closure
    /// would exceed `cap` elements.
    pub fn closure(&self, gens: &[GroupElt], cap: usize) -> Result<Vec<GroupElt>, FieldError> {
        let mut seen: HashSet<GroupElt> = HashSet::new();
        let mut out: Vec<GroupElt> = Vec::new();
        let mut frontier: Vec<GroupElt> = Vec::new();
        let id = self.identity();
        seen.insert(id);
        out.push(id);
        frontier.push(id);
        let mut step_gens: Vec<GroupElt> = Vec::new();
        for &g in gens {
            step_gens.push(g);
            step_gens.push(self.inv(g));
        }
        while let Some(cur) = frontier.pop() {
            for &g in &step_gens {
                let next = self.mul(cur, g);
                if seen.insert(next) {
                    if out.len() + 1 > cap {
                        return Err(FieldError::Domain(format!(
                            "subgroup closure exceeded the cap of {cap} elements"
                        )));
                    }
                    out.push(next);
                    frontier.push(next);
                }
            }
        }
        Ok(out)
    }

    // -- text format ------------------------------------------------------

    /// "t,u,v|s|j" with each scalar in the field's coefficient-string format.
    pub fn format_elt(&self, a: GroupElt) -> String {
        let f = self.f;
        format!(
            "{},{},{}|{}|{}",
            f.format_element(a.x.t),
            f.format_element(a.x.u),
            f.format_element(a.x.v),
            f.format_element(a.s),
            a.j
        )
    }

    pub fn parse_elt(&self, s: &str) -> Result<GroupElt, FieldError> {
        let f = self.f;
        let parts: Vec<&str> = s.split('|').collect();
        if parts.len() != 3 {
            return Err(FieldError::Parse(format!(
                "expected \"t,u,v|s|j\", got {s:?}"
            )));
        }
        let coords: Vec<&str> = parts[0].split(',').collect();
        if coords.len() != 3 {
            return Err(FieldError::Parse(format!(
                "expected three unipotent coordinates, got {:?}",
                parts[0]
            )));
        }
        let t = f.parse_element(coords[0])?;
        let u = f.parse_element(coords[1])?;
        let v = f.parse_element(coords[2])?;
        let torus = f.parse_element(parts[1])?;
        if f.is_zero(torus) {
            return Err(FieldError::Parse("torus coordinate must be nonzero".into()));
        }
        let j: usize = parts[2]
            .parse()
            .map_err(|_| FieldError::Parse(format!("bad automorphism exponent {:?}", parts[2])))?;
        if j >= f.m() {
            return Err(FieldError::Parse(format!(
                "automorphism exponent {} out of range (m = {})",
                j,
                f.m()
            )));
        }
        Ok(GroupElt {
            x: Unipotent { t, u, v },
            s: torus,
            j,
        })
    }

    /// All of Q in enumeration order (t outermost).
    pub fn unipotent_elements(&self) -> impl Iterator<Item = Unipotent> + 'f {
        let f = self.f;
        let q = f.q();
        (0..q * q * q).map(move |i| Unipotent {
            t: f.from_index(i / (q * q)),
            u: f.from_index((i / q) % q),
            v: f.from_index(i % q),
        })
    }

    /// All of B = Q:H in enumeration order.
    pub fn borel_elements(&self) -> impl Iterator<Item = GroupElt> + 'f {
        let f = self.f;
        let this = Borel { f };
        this.unipotent_elements().flat_map(move |x| {
            (1..f.q()).map(move |si| GroupElt {
                x,
                s: f.from_index(si),
                j: 0,
            })
        })
    }
}
