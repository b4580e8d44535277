use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tiling_cohomology::approximant::build_approximant;
use tiling_cohomology::homalg::{
    cohomology, direct_limit_endomorphism, direct_limit_sequence, group_equal, smith_normal_form,
    AbelianGroup, Coefficients, Equality, GroupHom, IntegerMatrix,
};
use tiling_cohomology::{bundled, CellComplex};

/// Rank by fraction-free (Bareiss) elimination, written independently of the
/// library's Smith normal form.
fn bareiss_rank(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let (m, n) = (a.len(), a.first().map_or(0, Vec::len));
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..n {
        let Some(p) = (rank..m).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for i in rank + 1..m {
            for j in col + 1..n {
                let v = &a[rank][col] * &a[i][j] - &a[i][col] * &a[rank][j];
                a[i][j] = v / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
        if rank == m {
            break;
        }
    }
    rank
}

fn random_matrix(rng: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
    let m = rng.gen_range(1..7);
    let n = rng.gen_range(1..7);
    // low-rank products now and then so that rank deficiency is exercised
    if rng.gen_bool(0.3) {
        let k = rng.gen_range(1..=m.min(n));
        let b: Vec<Vec<i64>> = (0..m)
            .map(|_| (0..k).map(|_| rng.gen_range(-4..5)).collect())
            .collect();
        let c: Vec<Vec<i64>> = (0..k)
            .map(|_| (0..n).map(|_| rng.gen_range(-4..5)).collect())
            .collect();
        return (0..m)
            .map(|i| {
                (0..n)
                    .map(|j| (0..k).map(|t| b[i][t] * c[t][j]).sum())
                    .collect()
            })
            .collect();
    }
    (0..m)
        .map(|_| {
            (0..n)
                .map(|_| {
                    if rng.gen_bool(0.4) {
                        0
                    } else {
                        rng.gen_range(-9..10)
                    }
                })
                .collect()
        })
        .collect()
}

#[test]
fn smith_form_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let rows = random_matrix(&mut rng);
        let a = IntegerMatrix::from_rows(&rows);
        let s = smith_normal_form(&a);
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
        assert_eq!(s.u.mul(&s.u_inv), IntegerMatrix::identity(a.rows()));
        assert_eq!(s.v.mul(&s.v_inv), IntegerMatrix::identity(a.cols()));
        let diag = s.diagonal();
        for w in diag.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        assert!(diag.iter().all(|d| d > &BigInt::zero()));
        assert_eq!(s.rank(), bareiss_rank(&rows), "{rows:?}");
    }
}

fn describe(x: &CellComplex, coeff: Coefficients) -> Vec<String> {
    let h = cohomology(&x.cochain_complex().unwrap(), coeff).unwrap();
    (0..=x.dimension).map(|k| h.describe(k)).collect()
}

#[test]
fn closed_surfaces() {
    let z = Coefficients::Integer;
    assert_eq!(
        describe(&bundled::complex("torus").unwrap(), z),
        ["Z", "Z^2", "Z"]
    );
    assert_eq!(
        describe(&bundled::complex("klein").unwrap(), z),
        ["Z", "Z", "Z/2"]
    );
    assert_eq!(
        describe(&bundled::complex("projective-plane").unwrap(), z),
        ["Z", "0", "Z/2"]
    );
    assert_eq!(
        describe(&bundled::complex("wedge").unwrap(), z),
        ["Z", "Z^2"]
    );
    assert_eq!(
        describe(
            &bundled::complex("projective-plane").unwrap(),
            Coefficients::Rational
        ),
        ["Q", "0", "0"]
    );
}

fn all_complexes() -> Vec<(String, CellComplex)> {
    let mut out: Vec<(String, CellComplex)> = bundled::COMPLEXES
        .iter()
        .map(|(n, _)| (n.to_string(), bundled::complex(n).unwrap()))
        .collect();
    for (name, _) in bundled::RULES {
        let r = bundled::rule(name).unwrap();
        for n in 0..=1 {
            let ac = build_approximant(&r, n).unwrap();
            out.push((format!("{name} level {n}"), ac.complex().clone()));
        }
    }
    out
}

fn divisible(g: &AbelianGroup, p: u64) -> usize {
    g.torsion().iter().filter(|d| (*d % p).is_zero()).count()
}

// H^k(X; Z/p) ≅ H^k(X) ⊗ Z/p ⊕ Tor(H^{k+1}(X), Z/p)
#[test]
fn universal_coefficients() {
    for (name, x) in all_complexes() {
        let cc = x.cochain_complex().unwrap();
        let hz = cohomology(&cc, Coefficients::Integer).unwrap();
        for p in [2u64, 3, 5] {
            let hp = cohomology(&cc, Coefficients::Modular(p)).unwrap();
            for k in 0..=x.dimension {
                let expected = hz.group(k).free_rank()
                    + divisible(hz.group(k), p)
                    + if k < x.dimension {
                        divisible(hz.group(k + 1), p)
                    } else {
                        0
                    };
                let g = hp.group(k);
                assert_eq!(g.free_rank(), 0, "{name}");
                assert!(g.torsion().iter().all(|d| *d == BigInt::from(p)), "{name}");
                assert_eq!(g.torsion().len(), expected, "{name} H^{k} mod {p}");
            }
        }
        let hq = cohomology(&cc, Coefficients::Rational).unwrap();
        for k in 0..=x.dimension {
            assert_eq!(hq.group(k).free_rank(), hz.group(k).free_rank());
        }
    }
}

/// Random unimodular matrix with its inverse, as products of elementary moves.
fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> (IntegerMatrix, IntegerMatrix) {
    let mut p = IntegerMatrix::identity(n);
    let mut p_inv = IntegerMatrix::identity(n);
    for _ in 0..6 {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n);
        while j == i {
            j = rng.gen_range(0..n);
        }
        let c: i64 = rng.gen_range(-3..4);
        let mut e = IntegerMatrix::identity(n);
        e.set(i, j, c.into());
        let mut e_inv = IntegerMatrix::identity(n);
        e_inv.set(i, j, (-c).into());
        p = e.mul(&p);
        p_inv = p_inv.mul(&e_inv);
    }
    (p, p_inv)
}

fn endo_limit(m: &IntegerMatrix) -> tiling_cohomology::homalg::LimitGroup {
    let g = AbelianGroup::free(m.rows());
    let e = GroupHom::new(g.clone(), g.clone(), m.clone()).unwrap();
    direct_limit_endomorphism(&g, &e).unwrap()
}

#[test]
fn endomorphism_limit_is_conjugation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (base, shown) in [
        (
            IntegerMatrix::from_rows(&[vec![2, 0], vec![0, 3]]),
            "Z[1/2] ⊕ Z[1/3]",
        ),
        (IntegerMatrix::from_rows(&[vec![1, 1], vec![1, 0]]), "Z^2"),
    ] {
        let reference = endo_limit(&base);
        assert_eq!(reference.to_string(), shown);
        for _ in 0..100 {
            let (p, p_inv) = random_unimodular(&mut rng, 2);
            let conj = p.mul(&base).mul(&p_inv);
            let lim = endo_limit(&conj);
            assert_eq!(group_equal(&reference, &lim), Equality::Equal, "{conj}");
        }
    }
}

#[test]
fn doubling_tower_is_undetermined() {
    let z = AbelianGroup::free(1);
    let two = GroupHom::new(z.clone(), z.clone(), IntegerMatrix::from_rows(&[vec![2]])).unwrap();
    let lim = direct_limit_sequence(&[z.clone(), z.clone(), z], &[two.clone(), two], 2).unwrap();
    assert!(!lim.is_determined());
    let d = endo_limit(&IntegerMatrix::from_rows(&[vec![2]]));
    assert_eq!(group_equal(&lim, &d), Equality::Indeterminate);
}

proptest! {
    #[test]
    fn smith_form_of_small_matrices(
        rows in proptest::collection::vec(proptest::collection::vec(-20i64..20, 4), 1..5)
    ) {
        let a = IntegerMatrix::from_rows(&rows);
        let s = smith_normal_form(&a);
        prop_assert_eq!(s.u.mul(&a).mul(&s.v), s.d.clone());
        prop_assert_eq!(s.rank(), bareiss_rank(&rows));
        // the product of invariant factors is the gcd of maximal minors up to sign;
        // for square full-rank input it is |det|
        if rows.len() == 4 && s.rank() == 4 {
            let prod: BigInt = s.diagonal().iter().product();
            let det = a.determinant();
            prop_assert_eq!(prod, if det < BigInt::zero() { -det } else { det });
        }
    }
}
