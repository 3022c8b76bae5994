//! Whole-match properties of the simulator.

use dta_core::sim::{overlap_seconds, run_match, Match, Mode, SimConfig};
use dta_core::task_assignment::Role;

const MODES: [Mode; 3] = [Mode::FixedRate, Mode::EventBased, Mode::EventVoronoi];

fn config(mode: Mode, seed: u64, match_len: f64) -> SimConfig {
    SimConfig {
        seed,
        mode,
        match_len,
        ..SimConfig::default()
    }
}

/// Without loss every agent replays the same events at the same tick, so
/// every agent computes the same plan every tick.
#[test]
fn lossless_channel_agrees_on_every_tick() {
    for mode in MODES {
        for delay in [0, 2] {
            let cfg = SimConfig {
                delay_ticks: delay,
                ..config(mode, 3, 120.0)
            };
            let mut m = Match::new(cfg).unwrap();
            while !m.is_over() {
                m.tick().unwrap();
                let plans = m.coordinations();
                let first = plans[0].expect("planned");
                for (i, p) in plans.iter().enumerate() {
                    assert_eq!(
                        p.map(|c| &c.assignment),
                        Some(&first.assignment),
                        "{mode:?} delay {delay}: robot {i} disagrees at tick {}",
                        m.tick_index()
                    );
                }
            }
            assert_eq!(m.finish().unwrap().total_overlap_s(), 0.0);
        }
    }
}

#[test]
fn same_seed_same_match() {
    for mode in MODES {
        let cfg = SimConfig {
            packet_loss: 0.15,
            delay_ticks: 2,
            ..config(mode, 11, 120.0)
        };
        assert_eq!(run_match(&cfg).unwrap(), run_match(&cfg).unwrap());
    }
}

#[test]
fn budget_and_packet_size_hold_in_every_mode() {
    for mode in MODES {
        for seed in 0..3 {
            let cfg = SimConfig {
                packet_loss: 0.15,
                delay_ticks: 2,
                ..config(mode, seed, 600.0)
            };
            let m = run_match(&cfg).unwrap();
            assert!(m.packets_sent <= cfg.total_budget, "{mode:?} seed {seed}: {}", m.packets_sent);
            assert!(m.max_packet_len <= 128);
            assert_eq!(m.packets_by_kind.iter().sum::<u32>(), m.packets_sent);
            assert!(m.packets_delivered <= m.packets_sent);
        }
    }
}

/// Each robot believes in at most one role at a time, so its spans tile the
/// match without gaps or overlaps, and the overlap counted per tick equals
/// the overlap of the spans.
#[test]
fn role_timeline_tiles_the_match() {
    let cfg = SimConfig {
        packet_loss: 0.15,
        delay_ticks: 2,
        ..config(Mode::EventBased, 4, 300.0)
    };
    let m = run_match(&cfg).unwrap();
    for robot in 0..cfg.team_size as u8 {
        let mut spans: Vec<_> = m.timeline.iter().filter(|s| s.robot.0 == robot).collect();
        spans.sort_by(|a, b| a.start.total_cmp(&b.start));
        assert_eq!(spans[0].start, 0.0);
        for w in spans.windows(2) {
            assert_eq!(w[0].end, w[1].start);
        }
        assert!((spans.last().unwrap().end - cfg.match_len).abs() < 1e-9);
    }
    for role in Role::ALL {
        assert!((m.overlap_s(role) - overlap_seconds(&m.spans(role))).abs() < 1e-6, "{role:?}");
    }
}

#[test]
fn fixed_rate_spacing() {
    assert_eq!(SimConfig::default().fixed_rate_interval(), 2.5);
    let other = SimConfig {
        match_len: 1800.0,
        total_budget: 1200,
        team_size: 7,
        ..SimConfig::default()
    };
    assert!((other.fixed_rate_interval() - 10.5).abs() < 1e-12);

    let m = run_match(&config(Mode::FixedRate, 0, 600.0)).unwrap();
    // One packet per robot every 2.5 s, staggered from t = 0.
    assert_eq!(m.packets_sent, 1200);
}
