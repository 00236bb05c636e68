//! Property tests over randomly generated schedules, complementing the
//! preset-based unit tests inside each module.

use proptest::prelude::*;

use rank1_core::centralizer::{code_inputs, enumerate_codes, language, shift_power_code};
use rank1_core::points::{extend, interior_margin, locate, max_z_window, psi, PointAddress};
use rank1_core::tower::{expected_positions, infinite_word_prefix, word};
use rank1_core::{Budget, CuttingSchedule, StageRule, TailRule};

fn arb_stage() -> impl Strategy<Value = StageRule> {
    (2u64..=4).prop_flat_map(|q| {
        proptest::collection::vec(0u64..=2, (q - 1) as usize..=(q - 1) as usize)
            .prop_map(move |spacers| StageRule::new(q, spacers))
    })
}

fn arb_tail() -> impl Strategy<Value = TailRule> {
    prop_oneof![
        3 => Just(TailRule::RepeatLast),
        1 => proptest::collection::vec(arb_stage(), 1..=2)
            .prop_map(|stages| TailRule::Cycle { stages }),
        1 => (0u64..=2, 0u64..=2).prop_map(|(base, slope)| TailRule::Arithmetic {
            q: 2,
            base,
            slope
        }),
    ]
}

fn arb_schedule() -> impl Strategy<Value = CuttingSchedule> {
    (
        1u64..=3,
        proptest::collection::vec(arb_stage(), 1..=3),
        arb_tail(),
    )
        .prop_map(|(h0, stages, tail)| {
            CuttingSchedule::new(h0, stages, tail).expect("generated schedules are valid")
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn heights_strictly_increase(schedule in arb_schedule()) {
        let mut prev = 0;
        for n in 0..=7 {
            let h = schedule.height(n).unwrap();
            prop_assert!(h > prev || n == 0);
            prev = h;
        }
    }

    #[test]
    fn words_nest_and_count_zeros(schedule in arb_schedule()) {
        let b = Budget::default();
        for n in 0..4usize {
            let w = word(&schedule, n, &b).unwrap().word;
            let w1 = word(&schedule, n + 1, &b).unwrap().word;
            prop_assert_eq!(&w1.bits()[..w.len()], w.bits());
            prop_assert_eq!(&w1.bits()[w1.len() - w.len()..], w.bits());
            let zeros = w1.bits().iter().filter(|&&s| s == 0).count() as u64;
            let product: u64 = (0..=n).map(|i| schedule.stage_rule(i).unwrap().q).product();
            prop_assert_eq!(zeros, schedule.h0() * product);
        }
    }

    #[test]
    fn prefixes_are_monotone(schedule in arb_schedule(), len in 2u64..=48) {
        let b = Budget::default();
        let long = infinite_word_prefix(&schedule, len, &b).unwrap();
        let short = infinite_word_prefix(&schedule, len - 1, &b).unwrap();
        prop_assert_eq!(short.bits(), &long.bits()[..short.len()]);
    }

    #[test]
    fn expected_sets_compose_and_cover(schedule in arb_schedule(), m in 2usize..=4) {
        let b = Budget::default();
        for n in 0..m {
            let direct = expected_positions(&schedule, m, n, &b).unwrap().positions;
            // compositional identity through every intermediate stage
            for k in n..=m {
                let upper = expected_positions(&schedule, m, k, &b).unwrap().positions;
                let lower = expected_positions(&schedule, k, n, &b).unwrap().positions;
                let mut composed: Vec<u64> = upper
                    .iter()
                    .flat_map(|&a| lower.iter().map(move |&c| a + c))
                    .collect();
                composed.sort_unstable();
                prop_assert_eq!(&composed, &direct);
            }
            // sizes multiply
            let product: u64 = (n..m).map(|i| schedule.stage_rule(i).unwrap().q).product();
            prop_assert_eq!(direct.len() as u64, product);
            // every zero of W_m sits in exactly one expected copy
            let w_m = word(&schedule, m, &b).unwrap().word;
            let h_n = schedule.height(n).unwrap();
            let mut covered = vec![0u8; w_m.len()];
            for &e in &direct {
                for i in e..e + h_n {
                    covered[i as usize] += 1;
                }
            }
            for (i, &sym) in w_m.bits().iter().enumerate() {
                if sym == 0 {
                    prop_assert_eq!(covered[i], 1);
                }
            }
        }
    }

    #[test]
    fn locate_survives_extension(schedule in arb_schedule(), seed in 0u64..1000) {
        let b = Budget::default();
        let depth = 3;
        let h = schedule.height(depth).unwrap();
        let level = seed % h;
        let addr = PointAddress::new(depth, level);
        let q = schedule.stage_rule(depth).unwrap().q;
        let before = interior_margin(&schedule, addr).unwrap();
        for c in 0..q {
            let lifted = extend(&schedule, addr, c).unwrap();
            for n in 0..=depth {
                prop_assert_eq!(
                    locate(&schedule, lifted, n).unwrap(),
                    locate(&schedule, addr, n).unwrap()
                );
            }
            let after = interior_margin(&schedule, lifted).unwrap();
            prop_assert!(after.down >= before.down);
            prop_assert!(after.up >= before.up);
            if c == 0 {
                prop_assert_eq!(after.down, before.down);
            }
            if c > 0 && c < q - 1 {
                prop_assert!(after.down > before.down && after.up > before.up);
            }
        }
        let _ = b;
    }

    #[test]
    fn return_gaps_respect_tower_heights(schedule in arb_schedule(), seed in 0u64..1000) {
        let b = Budget::default();
        let depth = 4;
        let h = schedule.height(depth).unwrap();
        let h1 = schedule.height(1).unwrap();
        if h <= 2 * h1 + 1 {
            return Ok(());
        }
        let level = h1 + seed % (h - 2 * h1);
        let addr = PointAddress::new(depth, level);
        let window = max_z_window(&schedule, addr, &b).unwrap();
        for pair in window.returns.windows(2) {
            prop_assert!((pair[1] - pair[0]) as u64 >= h1);
        }
        // every gap value is a difference of consecutive return positions
        if window.returns.len() >= 2 {
            let positions = expected_positions(&schedule, depth, 1, &b).unwrap().positions;
            let diffs: std::collections::HashSet<u64> =
                positions.windows(2).map(|p| p[1] - p[0]).collect();
            for (_, gap) in psi(&window).unwrap().entries {
                prop_assert!(diffs.contains(&gap));
            }
        }
        // stage-n aligned returns are at least h_n apart
        for n in 1..=depth {
            let h_n = schedule.height(n).unwrap();
            let stage = expected_positions(&schedule, depth, n, &b).unwrap().positions;
            let aligned: Vec<i64> = window
                .returns
                .iter()
                .copied()
                .filter(|&i| stage.binary_search(&((i + level as i64) as u64)).is_ok())
                .collect();
            for pair in aligned.windows(2) {
                prop_assert!((pair[1] - pair[0]) as u64 >= h_n);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn shift_powers_always_survive_enumeration(schedule in arb_schedule()) {
        let b = Budget::default();
        let h1 = schedule.height(1).unwrap() as usize;
        let radius = 1usize;
        let test_len = (2 * radius + h1).max(12);
        let lang = language(&schedule, test_len, true, &b).unwrap();
        if code_inputs(&lang, radius).len() > 12 {
            return Ok(()); // keep the exhaustive sweep cheap
        }
        let codes = enumerate_codes(&lang, radius, test_len, &b).unwrap();
        for k in -(radius as i64)..=radius as i64 {
            let sigma = shift_power_code(k, radius, &lang).unwrap();
            prop_assert!(codes.contains(&sigma));
        }
    }
}
