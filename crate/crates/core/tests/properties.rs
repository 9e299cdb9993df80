use opembed::embed::{classify, embed, EmbedOptions};
use opembed::opcore::{
    frobenius_norm, rank_analysis, CardinalDim, MatrixOperator, StructuredOperator, Tolerance, C64,
};
use opembed::samples;
use opembed::specfile::SpecFile;
use opembed::verify::{check_embedding, TimeSamples, Tolerances};
use proptest::prelude::*;

fn off_cut_eigenvalue() -> impl Strategy<Value = C64> {
    (0.5f64..2.0, -2.6f64..2.6).prop_map(|(r, th)| C64::from_polar(r, th))
}

/// Eigenvalues at least `gap` apart, so the similarity stays conditioned.
fn separated(eigs: Vec<C64>, gap: f64) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::new();
    for z in eigs {
        if out.iter().all(|w| (w - z).norm() >= gap) {
            out.push(z);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn embeddable_verdicts_verify(
        eigs in prop::collection::vec(off_cut_eigenvalue(), 1..6),
        seed in any::<u64>(),
    ) {
        let eigs = separated(eigs, 0.2);
        let m = samples::with_spectrum(&mut samples::rng(seed), &eigs, 0.3);
        let op = StructuredOperator::Dense(m.clone());
        let out = embed(&op, &EmbedOptions::default()).unwrap();
        prop_assert!(out.verdict.is_embeddable());
        let s = out.realization.unwrap();
        let report =
            check_embedding(&s, &m, &Tolerances::for_realization(&s), &TimeSamples::default())
                .unwrap();
        prop_assert!(report.pass, "{:?}", report.failures());
    }

    #[test]
    fn finite_dimensional_dichotomy(dim in 1usize..9, deficit in 0usize..9, seed in any::<u64>()) {
        let rank = dim.saturating_sub(deficit);
        let m = samples::random_of_rank(&mut samples::rng(seed), dim, rank);
        let verdict = classify(&StructuredOperator::Dense(m));
        prop_assert_eq!(verdict.is_embeddable(), rank == dim, "{}", verdict);
    }

    #[test]
    fn rank_nullity(dim in 1usize..10, deficit in 0usize..10, seed in any::<u64>()) {
        let rank = dim.saturating_sub(deficit);
        let m = samples::random_of_rank(&mut samples::rng(seed), dim, rank);
        let r = rank_analysis(&m, Tolerance::Auto).unwrap();
        prop_assert_eq!(r.rank, rank);
        prop_assert_eq!(r.kernel_dim, CardinalDim::Finite((dim - rank) as u64));
        prop_assert_eq!(r.kernel_dim, r.cokernel_dim);
    }

    #[test]
    fn endpoint_is_branch_independent(
        eigs in prop::collection::vec(off_cut_eigenvalue(), 1..8),
        offsets in prop::collection::vec(-3i64..=3, 8),
    ) {
        let n = eigs.len();
        let op = StructuredOperator::invertible_diagonal(eigs.clone()).unwrap();
        let opts = EmbedOptions {
            branch_offsets: Some(offsets[..n].to_vec()),
            ..EmbedOptions::default()
        };
        let s = embed(&op, &opts).unwrap().realization.unwrap();
        let t1 = s.evaluate(1.0).unwrap();
        let want = MatrixOperator::from_diagonal(&eigs).unwrap();
        prop_assert!(frobenius_norm(&(t1.matrix() - want.matrix())) <= 1e-12);
    }

    #[test]
    fn looser_tolerances_never_fail_more(seed in any::<u64>(), a in -14.0f64..-2.0, b in 0.0f64..6.0) {
        let m = samples::random_unitary(seed, 4);
        let s = embed(&StructuredOperator::Dense(m.clone()), &EmbedOptions::default())
            .unwrap()
            .realization
            .unwrap();
        let base = check_embedding(&s, &m, &Tolerances::default(), &TimeSamples::default()).unwrap();
        let tight = base.tolerances.with_override(Some(10f64.powf(a)));
        let loose = base.tolerances.with_override(Some(10f64.powf(a + b)));
        let fails = |t: Tolerances| {
            let mut r = base.clone();
            r.tolerances = t;
            r.failures()
        };
        let (ft, fl) = (fails(tight), fails(loose));
        prop_assert!(fl.iter().all(|f| ft.contains(f)), "{ft:?} vs {fl:?}");
    }

    #[test]
    fn isometry_embeds_iff_cokernel_is_zero_or_infinite(
        unitary_dim in 0usize..4,
        fibers in prop::collection::vec(prop::option::of(1usize..4), 0..3),
        seed in any::<u64>(),
    ) {
        let mut parts = Vec::new();
        if unitary_dim > 0 {
            parts.push(StructuredOperator::Dense(samples::random_unitary(seed, unitary_dim)));
        }
        let mut cokernel = CardinalDim::ZERO;
        for f in &fibers {
            let (dim, trunc) = match f {
                Some(k) => (CardinalDim::Finite(*k as u64), *k),
                None => (CardinalDim::Infinite, 2),
            };
            parts.push(StructuredOperator::right_shift(dim, trunc, 4).unwrap());
            cokernel = cokernel + dim;
        }
        prop_assume!(!parts.is_empty());
        let op = StructuredOperator::direct_sum(parts).unwrap();
        let verdict = classify(&op);
        let expect = cokernel == CardinalDim::ZERO || cokernel == CardinalDim::Infinite;
        prop_assert_eq!(verdict.is_embeddable(), expect, "{}", verdict);
    }

    #[test]
    fn spec_parsing_never_panics(text in "\\PC{0,200}") {
        if let Ok(spec) = SpecFile::parse(&text) {
            let _ = spec.to_operator();
        }
    }

    #[test]
    fn structured_spec_parsing_never_panics(
        kind in prop::sample::select(vec![
            "dense", "diagonal", "right_shift", "left_shift", "multiplication",
            "volterra", "zero", "compact", "direct_sum", "bogus",
        ]),
        key in prop::sample::select(vec![
            "rows", "eigenvalues", "fiber", "fiber_truncation", "blocks", "grid",
            "points", "weights", "kernel", "cokernel", "dim", "truncation", "parts",
        ]),
        value in prop::sample::select(vec![
            "0", "-1", "3", "1e300", "\"infinite\"", "[]", "[[1.0]]", "[[0.0, 1.0], [0.0]]",
            "[1.0, [2.0, 3.0]]", "true", "{ re = 1.0 }",
        ]),
    ) {
        let text = format!("[operator]\nkind = \"{kind}\"\n{key} = {value}\n");
        if let Ok(spec) = SpecFile::parse(&text) {
            let _ = spec.to_operator();
        }
    }
}

#[test]
fn fuzz_corpus_seeds_replay() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    let mut seen = 0;
    for entry in std::fs::read_dir(root.join("spec_parse")).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        if let Ok(spec) = SpecFile::parse(&text) {
            if let Ok(op) = spec.to_operator() {
                let _ = classify(&op);
            }
        }
        seen += 1;
    }
    for entry in std::fs::read_dir(root.join("read_footer")).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        let _ = opembed::cli::read_footer(&text);
        seen += 1;
    }
    assert!(seen >= 10);
}
