use latin_canon::canonical::leading_pair_structure;
use latin_canon::cycles::{cycle_structure, sigma};
use latin_canon::onefact::{canonical_1f, of_to_unipotent, FactorSet};
use latin_canon::oracle::{brute_isotopic, enumerate_subsquares};
use latin_canon::sampler::JmChain;
use latin_canon::steiner::{canonical_sts, is_paired_standard_form, sts_to_quasigroup, BlockSet};
use latin_canon::{
    apply_labelling, canonical_labelling, lex_compare, species_canonical, Conjugate, LatinSquare, PartialLabelling,
    PartialPermutation,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn square(n: usize, seed: u64) -> LatinSquare {
    JmChain::new(n, seed).unwrap().next_square()
}

fn arb_square(max: usize) -> impl Strategy<Value = LatinSquare> {
    (2..=max, any::<u64>()).prop_map(|(n, seed)| square(n, seed))
}

// cycle lengths of rows (i, j) by walking columns directly
fn naive_gamma(l: &LatinSquare, i: usize, j: usize) -> Vec<usize> {
    let n = l.order();
    let mut seen = vec![false; n];
    let mut lens = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut c = start;
        let mut len = 0;
        while !seen[c] {
            seen[c] = true;
            len += 1;
            let s = l.get(j, c);
            c = (0..n).find(|&d| l.get(i, d) == s).unwrap();
        }
        lens.push(len);
    }
    lens.sort_unstable_by(|a, b| b.cmp(a));
    lens
}

fn max_gamma(l: &LatinSquare) -> Vec<usize> {
    let n = l.order();
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| naive_gamma(l, i, j)).max().unwrap()
}

// reduced, rows 0 and 1 in standard form with weakly decreasing blocks
fn in_standard_family(l: &LatinSquare) -> bool {
    let n = l.order();
    if (0..n).any(|x| l.get(0, x) != x || l.get(x, 0) != x) {
        return false;
    }
    let mut t = 0;
    let mut prev = usize::MAX;
    while t < n {
        let mut k = 1;
        while t + k < n && l.get(1, t + k - 1) == t + k {
            k += 1;
        }
        if l.get(1, t + k - 1) != t || k > prev {
            return false;
        }
        prev = k;
        t += k;
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_is_isotopism_invariant(l in arb_square(12), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = PartialLabelling::random(l.order(), &mut rng);
        let image = l.permuted(&phi).unwrap();
        prop_assert_eq!(canonical_labelling(&l).form, canonical_labelling(&image).form);
    }

    #[test]
    fn canonical_labelling_maps_input_to_form(l in arb_square(12)) {
        let res = canonical_labelling(&l);
        prop_assert!(res.labelling.is_isotopism());
        prop_assert_eq!(l.permuted(&res.labelling).unwrap(), res.form.clone());
        prop_assert_eq!(canonical_labelling(&res.form).form, res.form);
    }

    #[test]
    fn canonical_form_lies_in_standard_family(l in arb_square(12)) {
        let form = canonical_labelling(&l).form;
        prop_assert!(in_standard_family(&form));
        prop_assert_eq!(naive_gamma(&form, 0, 1), max_gamma(&l));
        prop_assert_eq!(leading_pair_structure(&form).unwrap().0, max_gamma(&l));
    }

    #[test]
    fn no_doubling_violations(l in arb_square(14)) {
        let res = canonical_labelling(&l);
        prop_assert_eq!(res.stats.doubling_violations, 0);
        prop_assert!(res.stats.leaves >= 1);
    }

    #[test]
    fn canonical_agrees_with_brute_force(a in arb_square(5), b_seed in any::<u64>()) {
        let b = square(a.order(), b_seed);
        let fast = canonical_labelling(&a).form == canonical_labelling(&b).form;
        prop_assert_eq!(fast, brute_isotopic(&a, &b).unwrap());
    }

    #[test]
    fn species_is_conjugate_invariant(l in arb_square(8), k in 0usize..6) {
        let conj = l.conjugate(Conjugate::ALL[k]);
        prop_assert_eq!(species_canonical(&l), species_canonical(&conj));
    }

    #[test]
    fn conjugate_inverse_round_trips(l in arb_square(9), k in 0usize..6) {
        let c = Conjugate::ALL[k];
        prop_assert_eq!(l.conjugate(c).conjugate(c.inverse()), l);
    }

    #[test]
    fn text_and_compact_round_trip(l in arb_square(20)) {
        prop_assert_eq!(LatinSquare::parse(&l.to_text()).unwrap(), l.clone());
        let compact = l.to_compact().unwrap();
        prop_assert_eq!(LatinSquare::parse_compact(&compact).unwrap(), l);
    }

    #[test]
    fn cycle_structure_is_an_isotopism_invariant(l in arb_square(12), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = l.order();
        let phi = PartialLabelling::random(n, &mut rng);
        let image = l.permuted(&phi).unwrap();
        let a = phi.alpha.clone();
        for i in 0..n {
            for j in i + 1..n {
                let g = cycle_structure(&l, i, j).unwrap();
                prop_assert_eq!(g.0.clone(), naive_gamma(&l, i, j));
                let (ii, jj) = (a.get(i).unwrap(), a.get(j).unwrap());
                prop_assert_eq!(cycle_structure(&image, ii, jj).unwrap(), g);
            }
        }
    }

    #[test]
    fn sigma_is_a_derangement(l in arb_square(12)) {
        let s = sigma(&l, 0, 1).unwrap();
        let mut sorted = s.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..l.order()).collect::<Vec<_>>());
        prop_assert!(s.iter().enumerate().all(|(x, &y)| x != y));
    }

    #[test]
    fn lex_compare_is_antisymmetric(a in arb_square(6), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = a.order();
        let b = a.permuted(&PartialLabelling::random(n, &mut rng)).unwrap();
        let pa = apply_labelling(&a, &PartialLabelling::identity(n)).unwrap();
        let pb = apply_labelling(&b, &PartialLabelling::identity(n)).unwrap();
        prop_assert_eq!(lex_compare(&pa, &pb).unwrap(), lex_compare(&pb, &pa).unwrap().reverse());
        prop_assert_eq!(lex_compare(&pa, &pb).unwrap(), a.cmp(&b));
    }

    #[test]
    fn subsquare_closure_agrees_with_exhaustive(n in 4usize..=8, seed in any::<u64>()) {
        let report = enumerate_subsquares(&square(n, seed));
        prop_assert!(report.cross_check_agrees());
        prop_assert!(report.largest_proper <= n / 2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sts_canonical_is_relabelling_invariant(nine in any::<bool>(), seed in any::<u64>()) {
        let base = if nine { BlockSet::affine_plane_9() } else { BlockSet::fano() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let perm: Vec<usize> = PartialPermutation::random(base.order(), &mut rng).images().into_iter().map(Option::unwrap).collect();
        let a = canonical_sts(&sts_to_quasigroup(&base));
        let b = canonical_sts(&sts_to_quasigroup(&base.relabel(&perm)));
        prop_assert!(is_paired_standard_form(&b.form));
        prop_assert_eq!(a.form, b.form);
    }

    #[test]
    fn one_factorisation_canonical_is_invariant(v in prop::sample::select(vec![4usize, 6, 8, 10]), seed in any::<u64>()) {
        let base = FactorSet::patterned(v).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let perm: Vec<usize> = PartialPermutation::random(v, &mut rng).images().into_iter().map(Option::unwrap).collect();
        let order: Vec<usize> = PartialPermutation::random(v - 1, &mut rng).images().into_iter().map(Option::unwrap).collect();
        let moved = base.relabel(&perm).reorder(&order);
        let a = canonical_1f(&of_to_unipotent(&base));
        let b = canonical_1f(&of_to_unipotent(&moved));
        prop_assert_eq!(a.form, b.form);
    }
}

#[test]
fn brute_isotopic_is_an_equivalence_on_small_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (n, seed) in [(4, 1), (4, 2), (5, 3), (5, 4)] {
        let squares: Vec<_> = JmChain::new(n, seed).unwrap().take(4).collect();
        for a in &squares {
            assert!(brute_isotopic(a, a).unwrap());
            let image = a.permuted(&PartialLabelling::random(n, &mut rng)).unwrap();
            assert!(brute_isotopic(a, &image).unwrap() && brute_isotopic(&image, a).unwrap());
            for b in &squares {
                assert_eq!(brute_isotopic(a, b).unwrap(), brute_isotopic(b, a).unwrap());
                for c in &squares {
                    if brute_isotopic(a, b).unwrap() && brute_isotopic(b, c).unwrap() {
                        assert!(brute_isotopic(a, c).unwrap());
                    }
                }
            }
        }
    }
}

#[test]
fn group_table_subsquares_cross_check() {
    for l in [LatinSquare::cyclic(4), LatinSquare::elementary_abelian(2), LatinSquare::cyclic(8), LatinSquare::elementary_abelian(3)] {
        assert!(enumerate_subsquares(&l).cross_check_agrees());
    }
    assert_eq!(enumerate_subsquares(&LatinSquare::elementary_abelian(3)).largest_proper, 4);
}
