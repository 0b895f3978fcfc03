//! Cross-strategy properties over a synthetic corpus.

use hetpipe::fixtures::fixture;
use hetpipe::oracle::{brute_force_with, OracleConfig, Order};
use hetpipe::synth::{generate, GenSpec};
use hetpipe::{is_resource_valid, Platform, Rational, Strategy};

fn corpus() -> impl Iterator<Item = (hetpipe::TaskChain, Platform)> {
    let platforms = [(16, 4), (10, 10), (4, 16), (2, 2), (1, 5)];
    (0..300u64).map(move |i| {
        let sr = [0.2, 0.5, 0.8][i as usize % 3];
        let (b, l) = platforms[i as usize % platforms.len()];
        (
            generate(&GenSpec::new(20, sr, 500 + i)).unwrap(),
            Platform::new(b, l).unwrap(),
        )
    })
}

#[test]
fn herad_bounds_every_strategy_and_all_fit() {
    for (chain, p) in corpus() {
        let best = Strategy::Herad.run_default(&chain, &p).unwrap();
        assert!(is_resource_valid(best.stages(), &p));
        for s in [
            Strategy::Fertac,
            Strategy::TwoCatac,
            Strategy::OtacBig,
            Strategy::OtacLittle,
        ] {
            let sol = s.run_default(&chain, &p).unwrap();
            assert!(is_resource_valid(sol.stages(), &p), "{s} on {p}");
            assert!(sol.period() >= best.period(), "{s} beat herad on {}", chain.name());
        }
    }
}

#[test]
fn twocatac_rarely_loses_to_fertac() {
    let (mut worse, mut total) = (0, 0);
    for (chain, p) in corpus() {
        let f = Strategy::Fertac.run_default(&chain, &p).unwrap();
        let t = Strategy::TwoCatac.run_default(&chain, &p).unwrap();
        total += 1;
        if t.period() > f.period() {
            worse += 1;
        }
    }
    assert!(worse * 20 <= total, "2catac worse on {worse} of {total}");
}

#[test]
fn greedy_strategies_beat_all_big_on_the_receiver() {
    let chain = fixture("orangepi5plus").unwrap().chain();
    let p = Platform::new(2, 2).unwrap();
    let bound = Rational::new(104133, 10);
    for s in [Strategy::Fertac, Strategy::TwoCatac] {
        assert!(s.run_default(&chain, &p).unwrap().period() <= &bound);
    }
}

#[test]
fn oracle_is_order_independent() {
    for i in 0..40u64 {
        let chain = generate(&GenSpec::new(2 + (i as usize % 6), 0.5, 900 + i)).unwrap();
        let p = Platform::new(i as usize % 3, 1 + i as usize % 2).unwrap();
        let fwd = brute_force_with(&chain, &p, &OracleConfig::default()).unwrap();
        let rev = brute_force_with(
            &chain,
            &p,
            &OracleConfig {
                order: Order::Reverse,
                ..OracleConfig::default()
            },
        )
        .unwrap();
        assert_eq!(fwd.min_period, rev.min_period);
        assert_eq!(fwd.witness_count, rev.witness_count);
    }
}
