mod common;

use std::collections::BTreeSet;

use ammscope_core::arb::{cycle_effective, enumerate_cycles, optimize_cycle, track_durations, BlockKeys, CycleSetConfig};
use ammscope_core::cpmm::{swap_out, swap_out_exact, Direction, Fee, Pool, TokenId, Venue};
use ammscope_core::effective::{compose, effective_of_pool, EffectivePool};
use ammscope_core::ingest::{Network, PoolGraph};
use ammscope_core::metrics::{gain_stats_of, pearson, DailySeries};
use ammscope_core::route::{enumerate_paths, optimal_split, select_path_set, PathSetConfig};
use ammscope_core::snapshot::BlockSnapshot;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use proptest::prelude::*;

fn pool(r0: u128, r1: u128, fee: Fee) -> Pool {
    Pool::new(
        "p",
        Venue::Uniswap,
        TokenId::new("A", 18).unwrap(),
        TokenId::new("B", 18).unwrap(),
        BigUint::from(r0),
        BigUint::from(r1),
        fee,
    )
    .unwrap()
}

fn int(v: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(v.clone()))
}

fn fee() -> impl Strategy<Value = Fee> {
    (0u64..50, prop::sample::select(vec![1000u64, 10_000])).prop_map(|(n, d)| Fee::new(n, d).unwrap())
}

fn ep(a: f64, b: f64, c: f64) -> EffectivePool {
    EffectivePool::new(a, b, c, TokenId::new("A", 18).unwrap(), TokenId::new("B", 18).unwrap()).unwrap()
}

proptest! {
    #[test]
    fn constant_product_never_shrinks(r0 in 1u128..1 << 100, r1 in 1u128..1 << 100, t in 1u128..1 << 100, f in fee()) {
        let p = pool(r0, r1, f);
        let out = swap_out(&p, Direction::ZeroForOne, &BigUint::from(t)).unwrap();
        prop_assert!(out < p.reserve1);
        let before = &p.reserve0 * &p.reserve1;
        let after = (&p.reserve0 + BigUint::from(t)) * (&p.reserve1 - &out);
        prop_assert!(after >= before);
    }

    #[test]
    fn feeless_swap_keeps_product_exactly(r0 in 1u128..1 << 100, r1 in 1u128..1 << 100, t in 1u128..1 << 100) {
        let p = pool(r0, r1, Fee::zero());
        let out = swap_out_exact(&p, Direction::OneForZero, &BigUint::from(t)).unwrap();
        let lhs = (int(&p.reserve1) + int(&BigUint::from(t))) * (int(&p.reserve0) - out);
        prop_assert_eq!(lhs, int(&p.reserve0) * int(&p.reserve1));
    }

    #[test]
    fn larger_trades_get_worse_prices(r0 in 1u128..1 << 90, r1 in 1u128..1 << 90, t in 1u128..1 << 80, extra in 1u128..1 << 80, f in fee()) {
        let p = pool(r0, r1, f);
        let (t1, t2) = (BigUint::from(t), BigUint::from(t + extra));
        let (o1, o2) = (swap_out_exact(&p, Direction::ZeroForOne, &t1).unwrap(), swap_out_exact(&p, Direction::ZeroForOne, &t2).unwrap());
        prop_assert!(o2 >= o1);
        // Average price out/in strictly decreases.
        prop_assert!(o2 * int(&t1) < o1 * int(&t2));
    }

    #[test]
    fn composition_matches_sequential_swaps(
        r in prop::array::uniform4(1e3f64..1e9),
        x in 1e-3f64..1e10,
        keep in prop::array::uniform2(0.9f64..=1.0),
    ) {
        let (g1, g2) = (ep(r[1] * keep[0], r[0], keep[0]), ep(r[3] * keep[1], r[2], keep[1]));
        let g2 = EffectivePool::new(g2.a(), g2.b(), g2.c(), g1.out_token.clone(), g1.out_token.clone()).unwrap();
        let both = compose(&g1, &g2).unwrap();
        let seq = g2.eval(g1.eval(x));
        prop_assert!((both.eval(x) - seq).abs() <= 1e-12 * seq.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn split_beats_random_allocations(
        coeffs in prop::collection::vec((1.0f64..1e6, 1.0f64..1e6, 0.5f64..1.0), 2..6),
        total in 1e-2f64..1e7,
        weights in prop::collection::vec(0.0f64..1.0, 6),
    ) {
        let paths: Vec<EffectivePool> = coeffs.iter().map(|&(a, b, c)| ep(a, b, c)).collect();
        let plan = optimal_split(&paths, total).unwrap();
        let sum: f64 = plan.inputs.iter().sum();
        prop_assert!((sum - total).abs() <= 1e-9 * total);
        prop_assert!(plan.inputs.iter().all(|&x| x >= 0.0));
        prop_assert!(plan.kkt_residual(&paths) <= 1e-8);
        let w = &weights[..paths.len()];
        let ws: f64 = w.iter().sum::<f64>().max(1e-12);
        let other: f64 = paths.iter().zip(w).map(|(g, wi)| g.eval(total * wi / ws)).sum();
        prop_assert!(plan.total_output >= other * (1.0 - 1e-12));
    }

    #[test]
    fn cycle_optimum_scales_with_reserves(
        depths in prop::array::uniform3(1e5f64..1e8),
        skew in 1.02f64..1.5,
        k in prop::sample::select(vec![2u64, 3, 10, 1000]),
    ) {
        let g = PoolGraph::default_graph();
        let cfg = match g.network("arb-uniswap-triangle") { Some(Network::Cycles(c)) => c.clone(), _ => unreachable!() };
        let cycles = enumerate_cycles(&g, &cfg);
        let build = |scale: u64| {
            let mut snap = BlockSnapshot::new(1);
            for (i, id) in ["uni-ETH-USDC", "uni-ETH-USDT", "uni-USDC-USDT"].iter().enumerate() {
                let info = g.pool(&(*id).into()).unwrap();
                let d = depths[i] as u64;
                let r0 = BigUint::from(d) * BigUint::from(10u32).pow(12) * scale;
                let mut r1 = BigUint::from(d) * BigUint::from(10u32).pow(6) * scale;
                if i == 0 {
                    r1 = BigUint::from((d as f64 * skew) as u64) * BigUint::from(10u32).pow(6) * scale;
                }
                snap.insert(info.with_reserves(r0, r1));
            }
            snap
        };
        let (small, large) = (build(1), build(k));
        for c in &cycles {
            let (e1, ek) = (cycle_effective(c, &small).unwrap(), cycle_effective(c, &large).unwrap());
            match (optimize_cycle(&e1), optimize_cycle(&ek)) {
                (Some(o1), Some(ok)) => {
                    let kf = k as f64;
                    prop_assert!((ok.alpha_star - kf * o1.alpha_star).abs() <= 1e-9 * ok.alpha_star);
                    prop_assert!((ok.profit - kf * o1.profit).abs() <= 1e-9 * ok.profit);
                    prop_assert!((ok.relative_profit_pct() - o1.relative_profit_pct()).abs() <= 1e-9 * o1.relative_profit_pct());
                }
                (None, None) => {}
                other => prop_assert!(false, "profitability changed with scale: {:?}", other),
            }
        }
    }

    #[test]
    fn consistent_prices_never_profit(depths in prop::collection::vec(1e3f64..1e10, 12)) {
        let g = PoolGraph::default_graph();
        let cfg = CycleSetConfig { max_cycle_len: 4, ..CycleSetConfig::new(g.pool_ids()) };
        let snap = common::consistent_snapshot(1, &depths);
        for c in enumerate_cycles(&g, &cfg) {
            let e = cycle_effective(&c, &snap).unwrap();
            prop_assert!(e.a() / e.b() < 1.0);
        }
    }

    #[test]
    fn selected_paths_are_independent(depths in prop::collection::vec(1e3f64..1e10, 12), pair in 0usize..20) {
        let g = PoolGraph::default_graph();
        let symbols: Vec<String> = g.tokens().map(|t| t.symbol.clone()).collect();
        let (i, j) = (pair / 4, pair % 4);
        let (from, to) = (&symbols[i], &symbols[if j >= i { j + 1 } else { j }]);
        let cfg = PathSetConfig::new(g.pool_ids());
        let snap = common::consistent_snapshot(1, &depths);
        let candidates = enumerate_paths(&g, from, to, &cfg).unwrap();
        let set = select_path_set(&candidates, &snap, &cfg, |p| Ok(ammscope_core::amount::to_whole_units(&p.reserve0, p.token0.decimals))).unwrap();
        let mut pools = BTreeSet::new();
        let mut middles = BTreeSet::new();
        for p in &set {
            for id in p.pool_ids() {
                prop_assert!(pools.insert(id.clone()), "pool {} reused", id);
            }
            if p.len() == 2 {
                let first = g.pool(&p.hops[0].pool).unwrap();
                let mid = if p.hops[0].dir == Direction::ZeroForOne { &first.token1 } else { &first.token0 };
                prop_assert!(middles.insert(mid.symbol.clone()));
            }
        }
    }

    #[test]
    fn pearson_is_symmetric_affine_invariant_and_bounded(
        xy in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 3..60),
        scale in 1e-3f64..1e3,
        shift in -1e3f64..1e3,
    ) {
        let start = chrono::NaiveDate::from_ymd_opt(2021, 1, 1).unwrap();
        let x = DailySeries::new(start, xy.iter().map(|p| Some(p.0)).collect());
        let y = DailySeries::new(start, xy.iter().map(|p| Some(p.1)).collect());
        let ax = DailySeries::new(start, xy.iter().map(|p| Some(scale * p.0 + shift)).collect());
        if let Ok(r) = pearson(&x, &y) {
            prop_assert!((-1.0..=1.0).contains(&r));
            prop_assert!((pearson(&y, &x).unwrap() - r).abs() <= 1e-12);
            prop_assert!((pearson(&ax, &y).unwrap() - r).abs() <= 1e-9);
        }
    }

    #[test]
    fn top_five_percent_is_at_least_the_mean(gains in prop::collection::vec(0.0f64..10.0, 20..200)) {
        let s = gain_stats_of(&gains).unwrap();
        prop_assert!(s.top5_mean_pct >= s.mean_pct);
        prop_assert_eq!(s.n, gains.len());
    }

    #[test]
    fn runs_are_maximal(presence in prop::collection::vec(prop::collection::vec(any::<bool>(), 3), 0..40)) {
        let keys = ["a", "b", "c"];
        let scans: Vec<BlockKeys> = presence
            .iter()
            .enumerate()
            .map(|(i, row)| BlockKeys {
                block: 100 + i as u64,
                keys: Some(keys.iter().zip(row).filter(|(_, &p)| p).map(|(k, _)| k.to_string()).collect()),
            })
            .collect();
        let has = |k: &str, b: u64| scans.iter().any(|s| s.block == b && s.keys.as_ref().unwrap().contains(k));
        let runs = track_durations(&scans);
        let mut covered = 0;
        for r in &runs {
            prop_assert!(r.duration_blocks >= 1);
            prop_assert_eq!(r.duration_blocks, r.end_block - r.start_block + 1);
            for b in r.start_block..=r.end_block {
                prop_assert!(has(&r.canonical_key, b));
            }
            prop_assert!(!has(&r.canonical_key, r.start_block.wrapping_sub(1)));
            prop_assert!(!has(&r.canonical_key, r.end_block + 1));
            covered += r.duration_blocks;
        }
        let present: usize = presence.iter().map(|row| row.iter().filter(|p| **p).count()).sum();
        prop_assert_eq!(covered as usize, present);
    }
}

#[test]
fn effective_pool_of_real_pool_matches_integer_swap() {
    let p = pool(5_000_000_000_000, 7_000_000_000_000, Fee::UNISWAP_V2);
    let e = effective_of_pool(&p, Direction::ZeroForOne).unwrap();
    for t in [1u64, 1_000, 123_456_789, 4_000_000_000_000] {
        let exact = swap_out(&p, Direction::ZeroForOne, &BigUint::from(t)).unwrap();
        let approx = e.eval(t as f64);
        assert!((approx - ammscope_core::amount::ratio_to_f64(&exact, &BigUint::from(1u32))).abs() <= 1.0 + 1e-12 * approx);
    }
}
