//! 𝔽₃-subspaces of GF(3^m) and the trace-kernel lattice.
//!
//! The central object is A = {α − α^{3θ} : α ∈ GF(q)}, which by the additive
//! form of Hilbert 90 is exactly the kernel of the trace to GF(3). Its scalar
//! translates tA and their intersections obey
//!
//!   ⋂_{t∈T} tA = ⋂_{t ∈ span(T^{-1})∖0} t^{-1}A
//!
//! and the dimension identity
//!
//!   dim ⋂_{t∈T} tA + dim span(T^{-1}) = m.
//!
//! Subspaces are kept in reduced echelon form with pivots scanned from the
//! low coefficient index, so equality of subspaces is equality of bases.

use crate::gf3m::{FieldCtx, FieldError, Fq};
use crate::linalg::Mat3;

/// An 𝔽₃-subspace of GF(3^m) in canonical reduced-echelon basis form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    basis: Vec<Fq>,
}

impl Subspace {
    pub fn zero() -> Self {
        Subspace { basis: Vec::new() }
    }

    /// Canonicalizes an arbitrary spanning set.
    pub fn from_vectors(f: &FieldCtx, vectors: &[Fq]) -> Self {
        let rows: Vec<Vec<u8>> = vectors.iter().map(|&v| f.digits(v)).collect();
        let mut mat = Mat3::from_rows(&rows);
        if mat.rows == 0 {
            return Subspace::zero();
        }
        let pivots = mat.rref();
        let basis = (0..pivots.len())
            .map(|r| f.from_digits(&(0..mat.cols).map(|j| mat.at(r, j)).collect::<Vec<_>>()))
            .collect();
        Subspace { basis }
    }

    /// Kernel of a stack of 𝔽₃-linear conditions (rows).
    fn from_conditions(f: &FieldCtx, rows: &[Vec<u8>]) -> Self {
        if rows.is_empty() {
            return Subspace::from_vectors(
                f,
                &(0..f.m())
                    .map(|i| f.from_index(3u64.pow(i as u32)))
                    .collect::<Vec<_>>(),
            );
        }
        let mat = Mat3::from_rows(rows);
        let kernel: Vec<Fq> = mat.kernel().iter().map(|v| f.from_digits(v)).collect();
        Subspace::from_vectors(f, &kernel)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Fq] {
        &self.basis
    }

    pub fn contains(&self, f: &FieldCtx, a: Fq) -> bool {
        self.reduce(f, a) == f.zero()
    }

    /// Canonical coset representative: eliminates every pivot coordinate of
    /// the basis from `a`.
    pub fn reduce(&self, f: &FieldCtx, a: Fq) -> Fq {
        let mut r = a;
        for &b in &self.basis {
            let bd = f.digits(b);
            let pivot = bd
                .iter()
                .position(|&c| c != 0)
                .expect("basis rows are nonzero");
            match f.digits(r)[pivot] {
                0 => {}
                1 => r = f.sub(r, b),
                _ => r = f.add(r, b),
            }
        }
        r
    }

    /// All elements of the subspace (3^dim of them); small subspaces only.
    pub fn elements(&self, f: &FieldCtx) -> Vec<Fq> {
        let mut out = vec![f.zero()];
        for &b in &self.basis {
            let prev = out.clone();
            for v in prev {
                out.push(f.add(v, b));
                out.push(f.sub(v, b));
            }
            out.sort_unstable();
            out.dedup();
        }
        out
    }
}

/// The trace-kernel subspace A = {α − α^{3θ}} = ker Tr_{q/3}, of dimension
/// m − 1.
pub fn kernel_a(f: &FieldCtx) -> Subspace {
    let images: Vec<Fq> = (0..f.m())
        .map(|i| {
            let xi = f.from_index(3u64.pow(i as u32));
            f.sub(xi, f.three_theta(xi))
        })
        .collect();
    let s = Subspace::from_vectors(f, &images);
    debug_assert_eq!(s.dim(), f.m() - 1);
    s
}

/// {t·a : a ∈ S} for t ≠ 0.
pub fn scale_subspace(f: &FieldCtx, t: Fq, s: &Subspace) -> Result<Subspace, FieldError> {
    if f.is_zero(t) {
        return Err(FieldError::Domain("cannot scale a subspace by zero".into()));
    }
    let scaled: Vec<Fq> = s.basis().iter().map(|&b| f.mul(t, b)).collect();
    Ok(Subspace::from_vectors(f, &scaled))
}

fn check_translate_args(f: &FieldCtx, ts: &[Fq]) -> Result<(), FieldError> {
    if ts.is_empty() {
        return Err(FieldError::Domain("the translate set must be nonempty".into()));
    }
    if ts.iter().any(|&t| f.is_zero(t)) {
        return Err(FieldError::Domain("translates must be nonzero".into()));
    }
    Ok(())
}

/// ⋂_{t∈T} tA. Each translate tA is the kernel of λ ↦ Tr_{q/3}(λ/t), so the
/// whole intersection is one elimination over |T| stacked conditions.
pub fn intersect_translates(f: &FieldCtx, ts: &[Fq]) -> Result<Subspace, FieldError> {
    check_translate_args(f, ts)?;
    let mut rows = Vec::with_capacity(ts.len());
    for &t in ts {
        let tinv = f.inv(t)?;
        let row: Vec<u8> = (0..f.m())
            .map(|i| {
                let xi = f.from_index(3u64.pow(i as u32));
                f.trace_to_prime(f.mul(xi, tinv))
            })
            .collect();
        rows.push(row);
    }
    Ok(Subspace::from_conditions(f, &rows))
}

/// span_{𝔽₃}{t^{-1} : t ∈ T}.
pub fn span_inverses(f: &FieldCtx, ts: &[Fq]) -> Result<Subspace, FieldError> {
    check_translate_args(f, ts)?;
    let invs: Vec<Fq> = ts
        .iter()
        .map(|&t| f.inv(t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Subspace::from_vectors(f, &invs))
}

/// dim ⋂_{t∈T} tA + dim span(T^{-1}) = m, evaluated from the two independently
/// computed subspaces. Always true; exists as an executable theorem check.
pub fn check_dim_identity(f: &FieldCtx, ts: &[Fq]) -> Result<bool, FieldError> {
    let inter = intersect_translates(f, ts)?;
    let span = span_inverses(f, ts)?;
    Ok(inter.dim() + span.dim() == f.m())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;
    use std::collections::BTreeSet;

    fn gf27() -> FieldCtx {
        FieldCtx::with_modulus(&[2, 2, 0, 1]).unwrap()
    }

    /// Brute-force translate via the trace test.
    fn brute_ta(f: &FieldCtx, t: Fq) -> BTreeSet<Fq> {
        f.elements()
            .filter(|&l| f.trace_to_prime(f.mul(l, f.inv(t).unwrap())) == 0)
            .collect()
    }

    /// Brute-force tA directly from the defining image {t(α − α^{3θ})}.
    fn brute_ta_image(f: &FieldCtx, t: Fq) -> BTreeSet<Fq> {
        f.elements()
            .map(|a| f.mul(t, f.sub(a, f.three_theta(a))))
            .collect()
    }

    #[test]
    fn kernel_a_dims_small_fields() {
        let f3 = FieldCtx::new(1).unwrap();
        assert_eq!(kernel_a(&f3).dim(), 0);

        let f27 = gf27();
        let a27 = kernel_a(&f27);
        assert_eq!(a27.dim(), 2);
        // Tr(1) = 3 = 0 at m = 3, so 1 ∈ A
        assert!(a27.contains(&f27, f27.one()));

        let f243 = FieldCtx::new(5).unwrap();
        let a243 = kernel_a(&f243);
        assert_eq!(a243.dim(), 4);
        // Tr(1) = 5 = 2 ≠ 0 at m = 5
        assert!(!a243.contains(&f243, f243.one()));
    }

    #[test]
    fn kernel_a_is_trace_kernel_and_image_exhaustive() {
        let f = gf27();
        let a = kernel_a(&f);
        let by_trace: BTreeSet<Fq> = f.elements().filter(|&l| f.trace_to_prime(l) == 0).collect();
        let by_image: BTreeSet<Fq> = f
            .elements()
            .map(|al| f.sub(al, f.three_theta(al)))
            .collect();
        let by_basis: BTreeSet<Fq> = a.elements(&f).into_iter().collect();
        assert_eq!(by_trace, by_image);
        assert_eq!(by_trace, by_basis);
    }

    #[test]
    fn scale_by_prime_scalars_fixes_a() {
        let f = gf27();
        let a = kernel_a(&f);
        assert_eq!(scale_subspace(&f, f.one(), &a).unwrap(), a);
        assert_eq!(scale_subspace(&f, f.scalar(2), &a).unwrap(), a);
        assert!(scale_subspace(&f, f.zero(), &a).is_err());
    }

    #[test]
    fn scale_by_x_moves_a() {
        let f = gf27();
        let a = kernel_a(&f);
        let xa = scale_subspace(&f, f.gen_x(), &a).unwrap();
        assert_eq!(xa.dim(), 2);
        assert_ne!(xa, a);
        let expect = brute_ta_image(&f, f.gen_x());
        let got: BTreeSet<Fq> = xa.elements(&f).into_iter().collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn intersect_single_translate_is_a_itself() {
        let f = gf27();
        let got = intersect_translates(&f, &[f.one()]).unwrap();
        assert_eq!(got, kernel_a(&f));
        assert_eq!(got.dim(), 2);
    }

    #[test]
    fn intersect_two_translates_gf27() {
        let f = gf27();
        let t = vec![f.one(), f.gen_x()];
        let got = intersect_translates(&f, &t).unwrap();
        assert_eq!(got.dim(), 1);
        let brute: BTreeSet<Fq> = brute_ta(&f, f.one())
            .intersection(&brute_ta(&f, f.gen_x()))
            .copied()
            .collect();
        let got_set: BTreeSet<Fq> = got.elements(&f).into_iter().collect();
        assert_eq!(got_set, brute);
    }

    #[test]
    fn opposite_translates_coincide() {
        let f = gf27();
        let t = f.gen_x();
        let both = intersect_translates(&f, &[t, f.neg(t)]).unwrap();
        let single = intersect_translates(&f, &[t]).unwrap();
        assert_eq!(both, single);
    }

    #[test]
    fn span_inverses_examples() {
        let f = gf27();
        assert_eq!(span_inverses(&f, &[f.one()]).unwrap().dim(), 1);
        assert_eq!(span_inverses(&f, &[f.one(), f.gen_x()]).unwrap().dim(), 2);
        let t = f.gen_x();
        let two_t = f.add(t, t);
        assert_eq!(span_inverses(&f, &[t, two_t]).unwrap().dim(), 1);
        assert!(span_inverses(&f, &[]).is_err());
        assert!(span_inverses(&f, &[f.zero()]).is_err());
    }

    #[test]
    fn dim_identity_examples() {
        let f243 = FieldCtx::new(5).unwrap();
        assert!(check_dim_identity(&f243, &[f243.one()]).unwrap());
        let f = gf27();
        assert!(check_dim_identity(&f, &[f.one(), f.gen_x()]).unwrap());
    }

    #[test]
    fn membership_iff_scaled_trace_vanishes_exhaustive() {
        let f = gf27();
        for t in f.units() {
            let ta = intersect_translates(&f, &[t]).unwrap();
            for l in f.elements() {
                let member = ta.contains(&f, l);
                let trace_zero = f.trace_to_prime(f.mul(l, f.inv(t).unwrap())) == 0;
                assert_eq!(member, trace_zero);
            }
        }
    }

    /// The span identity as literal subspace equality on every translate set
    /// of size ≤ 3 in GF(27)^× (all 2,951 of them), plus the dimension
    /// identity on each.
    #[test]
    fn span_identity_exhaustive_small_sets() {
        let f = gf27();
        let units: Vec<Fq> = f.units().collect();
        let mut subsets: Vec<Vec<Fq>> = Vec::new();
        for i in 0..units.len() {
            subsets.push(vec![units[i]]);
            for j in i + 1..units.len() {
                subsets.push(vec![units[i], units[j]]);
                for k in j + 1..units.len() {
                    subsets.push(vec![units[i], units[j], units[k]]);
                }
            }
        }
        assert_eq!(subsets.len(), 2_951);
        for ts in &subsets {
            let lhs = intersect_translates(&f, ts).unwrap();
            let span = span_inverses(&f, ts).unwrap();
            let span_units: Vec<Fq> = span
                .elements(&f)
                .into_iter()
                .filter(|&v| !f.is_zero(v))
                .map(|v| f.inv(v).unwrap())
                .collect();
            let rhs = intersect_translates(&f, &span_units).unwrap();
            assert_eq!(lhs, rhs);
            assert!(lhs.dim() + span.dim() == f.m());
        }
    }

    #[test]
    fn dim_identity_random_sets_gf243() {
        let f = FieldCtx::new(5).unwrap();
        let mut rng = Stream::new(0x5eed);
        for _ in 0..1_000 {
            let size = 1 + (rng.below(5)) as usize;
            let ts: Vec<Fq> = (0..size)
                .map(|_| f.from_index(1 + rng.below(f.q() - 1)))
                .collect();
            assert!(check_dim_identity(&f, &ts).unwrap());
        }
    }

    #[test]
    fn intersect_order_independent_and_scalar_stable() {
        let f = gf27();
        let x = f.gen_x();
        let x2 = f.sq(x);
        let a = intersect_translates(&f, &[f.one(), x, x2]).unwrap();
        let b = intersect_translates(&f, &[x2, f.one(), x]).unwrap();
        assert_eq!(a, b);
        // adding scalar multiples of existing translates changes nothing
        let c = intersect_translates(&f, &[f.one(), x, x2, f.neg(x), f.scalar(2)]).unwrap();
        assert_eq!(a, c);
    }
}
