//! Acceptance suite: one test per criterion, each printing a pass line with
//! its runtime. Run with `cargo test -p rank1-core --test acceptance --
//! --nocapture` to see every line.

use std::time::{Duration, Instant};

use rank1_core::centralizer::{
    centralizer_probe, phi_map_normalized, psi_conjugation_check, recover_offset,
    shift_power_code, language, OriginWord,
};
use rank1_core::error::Error;
use rank1_core::points::{
    interior_margin, max_z_window, psi_congruence_report, sample_interior_addresses,
    separation_check, z_window_two_sided_check, PointAddress,
};
use rank1_core::recognizer::{
    context_bound, is_expected_start, lemma_gap_check, minimal_context,
    stabilized_template_set, template_set, RecognitionVerdict, TemplateSet,
};
use rank1_core::tower::{expected_positions, word};
use rank1_core::{preset, Budget, CuttingSchedule, StageRule, TailRule};

fn budget() -> Budget {
    Budget::default()
}

fn finish(id: u32, name: &str, started: Instant, limit: Duration) {
    let elapsed = started.elapsed();
    println!("acceptance {id:02} ({name}): PASS in {elapsed:.2?} (limit {limit:?})");
    assert!(
        elapsed < limit,
        "criterion {id} exceeded its time limit: {elapsed:?} >= {limit:?}"
    );
}

#[test]
fn acceptance_01_word_and_height_fixtures() {
    let started = Instant::now();
    let b = budget();

    let chacon = preset("chacon").unwrap();
    let heights: Vec<u64> = (0..6).map(|n| chacon.height(n).unwrap()).collect();
    assert_eq!(heights, vec![1, 4, 13, 40, 121, 364]);
    assert_eq!(
        word(&chacon, 2, &b).unwrap().word.to_string(),
        "0010001010010"
    );

    let four = preset("paper-4copy").unwrap();
    let heights: Vec<u64> = (0..4).map(|n| four.height(n).unwrap()).collect();
    assert_eq!(heights, vec![1, 5, 21, 85]);
    assert_eq!(
        word(&four, 2, &b).unwrap().word.to_string(),
        "001000010010010000100"
    );

    finish(1, "word/height fixtures", started, Duration::from_secs(1));
}

#[test]
fn acceptance_02_unexpected_occurrences() {
    let started = Instant::now();
    let b = budget();
    let four = preset("paper-4copy").unwrap();

    let report = rank1_core::recognizer::unexpected_occurrences(&four, 2, 1, &b).unwrap();
    assert_eq!(report.expected, vec![0, 5, 11, 16]);
    assert_eq!(report.unexpected, vec![8]);

    for n in 1..5usize {
        for m in (n + 1)..=5usize {
            let report = rank1_core::recognizer::unexpected_occurrences(&four, m, n, &b).unwrap();
            assert!(
                !report.unexpected.is_empty(),
                "4-copy W_{n} in W_{m}: no unexpected occurrence"
            );
        }
    }

    finish(2, "unexpected occurrences", started, Duration::from_secs(1));
}

#[test]
fn acceptance_03_lemma_sweep() {
    let started = Instant::now();
    let b = budget();

    let mut four_copy_configurations = 0u64;
    for name in rank1_core::PRESETS {
        let schedule = preset(name).unwrap();
        let mut total = 0u64;
        let mut checked = 0u64;
        for m in 1..=6usize {
            for n in 0..m {
                let report = lemma_gap_check(&schedule, m, n, &b).unwrap();
                assert!(
                    report.violations.is_empty(),
                    "{name} m={m} n={n}: gap-matching violations {:?}",
                    report.violations
                );
                total += report.configurations;
                checked += report.checked;
            }
        }
        println!("  lemma sweep {name}: {total} configurations, {checked} with trailing train");
        if *name == "paper-4copy" {
            four_copy_configurations = total;
        }
    }
    assert!(four_copy_configurations > 0, "4-copy sweep found no configurations");

    finish(3, "gap-matching lemma sweep", started, Duration::from_secs(30));
}

fn recognizer_templates(schedule: &CuttingSchedule, b: &Budget) -> TemplateSet {
    match stabilized_template_set(schedule, 1, 8, b) {
        Ok(ts) => ts,
        // Growing spacer runs keep adding fresh contexts, so stabilization is
        // out of reach at desk scale; templates one stage above the scanned
        // word are still sound and complete for it.
        Err(Error::NoStabilization { .. }) => template_set(schedule, 1, 7, b).unwrap(),
        Err(other) => panic!("{other}"),
    }
}

#[test]
fn acceptance_04_context_bounds_and_recognizer() {
    let started = Instant::now();
    let b = budget();

    let chacon = preset("chacon").unwrap();
    let minimal = minimal_context(&chacon, 1, 4, &b).unwrap();
    assert!(minimal.l <= 30, "chacon minimal context {} > 30", minimal.l);
    assert_eq!(context_bound(&chacon, 1, 4, &b).unwrap().l, 30);

    let four = preset("paper-4copy").unwrap();
    let minimal = minimal_context(&four, 1, 4, &b).unwrap();
    assert!(minimal.l <= 47, "4-copy minimal context {} > 47", minimal.l);
    assert_eq!(context_bound(&four, 1, 4, &b).unwrap().l, 47);

    for name in ["chacon", "paper-4copy", "staircase"] {
        let schedule = preset(name).unwrap();
        let templates = recognizer_templates(&schedule, &b);
        let w6 = word(&schedule, 6, &b).unwrap().word;
        let w1 = word(&schedule, 1, &b).unwrap().word;
        let expected = expected_positions(&schedule, 6, 1, &b).unwrap().positions;
        let mut mismatches = 0usize;
        let mut classified = 0usize;
        for p in rank1_core::recognizer::occurrences(w6.bits(), w1.bits()) {
            match is_expected_start(&schedule, w6.bits(), p, &templates, &b).unwrap() {
                RecognitionVerdict::Expected => {
                    classified += 1;
                    if expected.binary_search(&(p as u64)).is_err() {
                        mismatches += 1;
                    }
                }
                RecognitionVerdict::Unexpected => {
                    classified += 1;
                    if expected.binary_search(&(p as u64)).is_ok() {
                        mismatches += 1;
                    }
                }
                RecognitionVerdict::InsufficientContext => {}
            }
        }
        assert!(classified > 0, "{name}: nothing classified");
        assert_eq!(mismatches, 0, "{name}: recognizer mismatches on W_6");
    }

    finish(
        4,
        "context bounds and recognizer",
        started,
        Duration::from_secs(60),
    );
}

#[test]
fn acceptance_05_z_window_invariants() {
    let started = Instant::now();
    let b = budget();

    for (seed_base, name) in rank1_core::PRESETS.iter().enumerate() {
        let schedule = preset(name).unwrap();
        let h1 = schedule.height(1).unwrap();

        let depths: Vec<usize> = (2..=6)
            .filter(|&d| schedule.height(d).unwrap() > 2 * h1)
            .collect();
        let per_depth = 200usize.div_ceil(depths.len());

        let mut checked = 0usize;
        for &depth in &depths {
            let expected_by_stage: Vec<Vec<u64>> = (0..=depth)
                .map(|n| expected_positions(&schedule, depth, n, &b).unwrap().positions)
                .collect();
            let seed = 0x5eed + seed_base as u64 * 101 + depth as u64;
            for addr in
                sample_interior_addresses(&schedule, depth, h1, per_depth, seed).unwrap()
            {
                if checked >= 200 {
                    break;
                }
                let window = max_z_window(&schedule, addr, &b).unwrap();
                for pair in window.returns.windows(2) {
                    assert!(
                        (pair[1] - pair[0]) as u64 >= h1,
                        "{name} {addr}: return gap below h_1"
                    );
                }
                for (n, stage_positions) in expected_by_stage.iter().enumerate().skip(1) {
                    let h_n = schedule.height(n).unwrap();
                    let aligned: Vec<i64> = window
                        .returns
                        .iter()
                        .copied()
                        .filter(|&i| {
                            stage_positions
                                .binary_search(&((i + addr.level as i64) as u64))
                                .is_ok()
                        })
                        .collect();
                    for pair in aligned.windows(2) {
                        assert!(
                            (pair[1] - pair[0]) as u64 >= h_n,
                            "{name} {addr}: stage-{n} aligned gap below h_{n}"
                        );
                    }
                }
                assert!(
                    z_window_two_sided_check(&schedule, addr, h1, &b).unwrap(),
                    "{name} {addr}: window is one-sided"
                );
                checked += 1;
            }
        }
    }

    finish(5, "z-window invariants", started, Duration::from_secs(30));
}

/// First stage at which the two addresses' tower locations differ.
fn separating_stage(
    schedule: &CuttingSchedule,
    a: PointAddress,
    c: PointAddress,
) -> usize {
    use rank1_core::points::locate;
    for n in 0..=a.depth {
        if locate(schedule, a, n).unwrap() != locate(schedule, c, n).unwrap() {
            return n;
        }
    }
    unreachable!("distinct levels differ at their own depth")
}

#[test]
fn acceptance_06_separation() {
    let started = Instant::now();
    let b = budget();

    for name in ["chacon", "paper-4copy", "staircase"] {
        let schedule = preset(name).unwrap();
        let depth = 6;
        let h = schedule.height(depth).unwrap();
        let h1 = schedule.height(1).unwrap();

        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xd157);
        let mut pairs = 0;
        let mut rejected = 0usize;
        while pairs < 100 {
            let a = rng.gen_range(h1..=h - 1 - h1);
            let c = rng.gen_range(h1..=h - 1 - h1);
            if a == c {
                continue;
            }
            let addr_a = PointAddress::new(depth, a);
            let addr_c = PointAddress::new(depth, c);
            // The relevant context bound is the one for the first stage where
            // the two points part ways; the window has to reach one copy of
            // that stage plus the recognition context on both sides.
            let stage = separating_stage(&schedule, addr_a, addr_c);
            let radius = match context_bound(&schedule, stage, depth + 2, &b) {
                Ok(bound) => bound.l + schedule.height(stage).unwrap() + h1,
                Err(_) => {
                    rejected += 1;
                    continue;
                }
            };
            if a < radius || c < radius || a + radius + h1 > h || c + radius + h1 > h {
                rejected += 1;
                continue; // bound does not fit inside depth 6 for this pair
            }
            let report = separation_check(&schedule, addr_a, addr_c, radius, &b).unwrap();
            assert_eq!(report.radius_used, radius);
            let (level_stage, _) = report.separating_level.expect("distinct interior points");
            assert_eq!(level_stage, stage, "{name}: separating stage mismatch");
            assert!(
                report.windows_differ,
                "{name}: windows agree for levels {a} and {c} at radius {radius} (stage {stage})"
            );
            pairs += 1;
        }
        println!("  separation {name}: 100 pairs differ ({rejected} rejected as out of window reach)");
    }

    finish(6, "interior point separation", started, Duration::from_secs(30));
}

#[test]
fn acceptance_07_congruence_classes() {
    let started = Instant::now();
    let b = budget();

    let staircase = preset("staircase").unwrap();
    let addr = PointAddress::new(5, 44);
    assert!(interior_margin(&staircase, addr)
        .unwrap()
        .is_k_interior(staircase.height(1).unwrap()));
    let report = psi_congruence_report(&staircase, addr, None, 2, &b).unwrap();
    assert_eq!(report.modulus, 2, "r_2 should be 2");
    assert!(report.classes.iter().map(|c| c.values.len()).sum::<usize>() >= 3 * report.modulus - 1);
    assert_eq!(report.constant_classes, report.modulus - 1);
    assert_eq!(report.varying_classes, 1);
    assert!(report.asserted);
    assert_eq!(report.claim_shadow_holds, Some(true));

    finish(7, "gap congruence classes", started, Duration::from_secs(10));
}

#[test]
fn acceptance_08_centralizer_probe() {
    let started = Instant::now();
    let b = budget();

    // Counts frozen from the exhaustive enumeration itself.
    let chacon = preset("chacon").unwrap();
    let report = centralizer_probe(&chacon, "chacon", 2, 24, 3, &b).unwrap();
    assert_eq!(report.language_preserving, 5);
    assert_eq!(report.invertible, 5);
    assert_eq!(report.exotic_count, 0);
    let mut powers: Vec<i64> = report
        .survivors
        .iter()
        .map(|s| s.matched_power.expect("no exotic survivors"))
        .collect();
    powers.sort();
    assert_eq!(powers, vec![-2, -1, 0, 1, 2]);

    let four = preset("paper-4copy").unwrap();
    let report = centralizer_probe(&four, "paper-4copy", 1, 20, 2, &b).unwrap();
    assert_eq!(report.language_preserving, 3);
    assert_eq!(report.invertible, 3);
    assert_eq!(report.exotic_count, 0);
    let mut powers: Vec<i64> = report
        .survivors
        .iter()
        .map(|s| s.matched_power.expect("no exotic survivors"))
        .collect();
    powers.sort();
    assert_eq!(powers, vec![-1, 0, 1]);

    finish(8, "centralizer probe", started, Duration::from_secs(600));
}

#[test]
fn acceptance_09_degenerate_control() {
    let started = Instant::now();
    let b = budget();

    // The 2-periodic word 0101...: repeating, so the triviality prediction
    // does not apply, and the symbol swap survives as an invertible
    // non-shift-power code. The non-repeating hypothesis is load-bearing.
    let periodic2 = CuttingSchedule::new(
        1,
        vec![StageRule::new(2, vec![1])],
        TailRule::RepeatLast,
    )
    .unwrap();
    let report = centralizer_probe(&periodic2, "periodic2", 0, 8, 1, &b).unwrap();
    assert_eq!(
        report.scope,
        rank1_core::centralizer::ProbeScope::OutOfTheoremScope
    );
    assert_eq!(report.language_preserving, 2);
    assert_eq!(report.invertible, 2);
    assert_eq!(report.exotic_count, 1);
    let swap = report.survivors.iter().find(|s| s.exotic).unwrap();
    assert_eq!(swap.outputs, "10");
    let identity = report.survivors.iter().find(|s| !s.exotic).unwrap();
    assert_eq!(identity.matched_power, Some(0));

    finish(9, "degenerate control", started, Duration::from_secs(1));
}

#[test]
fn acceptance_10_phi_pipeline() {
    let started = Instant::now();
    let b = budget();

    let chacon = preset("chacon").unwrap();
    let h1 = chacon.height(1).unwrap() as i64;
    let lang = language(&chacon, 24, false, &b).unwrap();
    let templates = stabilized_template_set(&chacon, 1, 8, &b).unwrap();
    let window = OriginWord::tower_window(&chacon, 6, &b).unwrap();

    for k in -2i64..=2 {
        let code = shift_power_code(k, 2, &lang).unwrap();
        let matching = phi_map_normalized(&chacon, &window, &code, &templates, &b).unwrap();
        assert!(matching.order_preserving, "power {k}: order broken");
        assert!(matching.injective, "power {k}: not injective");
        assert!(matching.surjective_on_safe, "power {k}: not surjective");
        for pair in &matching.pairs {
            assert!(
                pair.x - h1 < pair.gx && pair.gx <= pair.x,
                "power {k}: pair bound violated at {}",
                pair.x
            );
            assert!((pair.offset as i64) < h1);
        }
        assert!(
            psi_conjugation_check(&matching).unwrap().is_empty(),
            "power {k}: gap conjugation violated"
        );
        assert_eq!(recover_offset(&matching).unwrap(), k);
    }

    // Every invertible probe survivor recovers the offset of its matched
    // power through the independent matching pipeline.
    let report = centralizer_probe(&chacon, "chacon", 2, 24, 3, &b).unwrap();
    for survivor in &report.survivors {
        assert_eq!(survivor.recovered_offset, survivor.matched_power);
        assert_eq!(survivor.psi_violations, Some(0));
    }

    finish(10, "return-matching pipeline", started, Duration::from_secs(60));
}
