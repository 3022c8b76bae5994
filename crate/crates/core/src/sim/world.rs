use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use super::SimConfig;
use crate::geometry::{Bounds, Point2};
use crate::world_model::{normalize_angle, roll, Odometry};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Team {
    Ours,
    Theirs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimRobot {
    pub team: Team,
    pub position: Point2,
    pub heading: f64,
    /// Where the robot lines up at kickoff.
    pub home: Point2,
    /// True motion during the last step, in the robot frame at its start.
    pub odometry: Odometry,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallState {
    pub position: Point2,
    pub velocity: Point2,
    /// Ticks until the ball may be kicked again.
    pub kick_lock: u32,
}

impl BallState {
    pub fn at_rest(position: Point2) -> BallState {
        BallState {
            position,
            velocity: Point2::ORIGIN,
            kick_lock: 0,
        }
    }
}

/// Ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldState {
    pub ball: BallState,
    /// Our robots first (index = robot id), then the opponents.
    pub robots: Vec<SimRobot>,
    pub ticks: u64,
    /// Seconds per tick.
    pub tick: f64,
    pub clock: f64,
}

/// Lineup for our half; opponents use the mirror image.
const HOMES: [Point2; 7] = [
    Point2::new(-4.2, 0.0),
    Point2::new(-3.0, 1.1),
    Point2::new(-3.0, -1.1),
    Point2::new(-1.5, 0.8),
    Point2::new(-1.5, -0.8),
    Point2::new(-2.2, 0.0),
    Point2::new(-0.8, 0.0),
];

impl WorldState {
    pub fn kickoff(cfg: &SimConfig) -> WorldState {
        let scale = Point2::new(cfg.field.length / 9.0, cfg.field.width / 6.0);
        let home = |i: usize, sign: f64| Point2::new(sign * HOMES[i].x * scale.x, HOMES[i].y * scale.y);
        let ours = (0..cfg.team_size).map(|i| SimRobot {
            team: Team::Ours,
            position: home(i, 1.0),
            heading: 0.0,
            home: home(i, 1.0),
            odometry: Odometry::default(),
        });
        let theirs = (0..cfg.opponent_count()).map(|i| SimRobot {
            team: Team::Theirs,
            position: home(i, -1.0),
            heading: core::f64::consts::PI,
            home: home(i, -1.0),
            odometry: Odometry::default(),
        });
        WorldState {
            ball: BallState::at_rest(Point2::ORIGIN),
            robots: ours.chain(theirs).collect(),
            ticks: 0,
            tick: cfg.tick,
            clock: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Look {
    At(Point2),
    /// Turn in place at this rate, rad/s.
    Spin(f64),
}

/// What one robot wants to do this tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Command {
    pub target: Point2,
    pub look: Look,
    /// May kick the ball if close enough.
    pub kicks: bool,
}

impl Command {
    /// Stand still, keep the current heading.
    pub fn hold(robot: &SimRobot) -> Command {
        Command {
            target: robot.position,
            look: Look::Spin(0.0),
            kicks: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepOutcome {
    pub goal: Option<Team>,
    /// Index of the robot that kicked.
    pub kicker: Option<usize>,
}

/// Scripted opponents: the one nearest the ball chases it, the others hold
/// their lineup spot shifted toward the ball's side.
pub fn opponent_commands(world: &WorldState, cfg: &SimConfig) -> Vec<Command> {
    let ball = world.ball.position;
    let theirs: Vec<&SimRobot> = world.robots.iter().filter(|r| r.team == Team::Theirs).collect();
    let chaser = theirs
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.position.distance(ball).total_cmp(&b.position.distance(ball)))
        .map(|(i, _)| i);
    let bounds = cfg.field.bounds();
    theirs
        .iter()
        .enumerate()
        .map(|(i, r)| Command {
            target: if Some(i) == chaser {
                ball
            } else {
                bounds.clamp(r.home + Point2::new(0.0, 0.3 * ball.y))
            },
            look: Look::At(ball),
            kicks: true,
        })
        .collect()
}

/// Advances the world by one tick. `commands` has one entry per robot, in
/// the order of `world.robots`.
pub fn step<R: Rng>(world: &mut WorldState, commands: &[Command], cfg: &SimConfig, rng: &mut R) -> StepOutcome {
    let dt = cfg.tick;
    let phys = &cfg.physics;
    let before: Vec<(Point2, f64)> = world.robots.iter().map(|r| (r.position, r.heading)).collect();

    for (r, c) in world.robots.iter_mut().zip(commands) {
        let to = c.target - r.position;
        let dist = to.norm();
        let reach = phys.robot_speed * dt;
        if dist > 0.0 {
            r.position = if dist <= reach { c.target } else { r.position + to * (reach / dist) };
        }
        let max_turn = phys.turn_rate * dt;
        let turn = match c.look {
            Look::At(p) => {
                let d = p - r.position;
                if d.norm() > 1e-9 {
                    normalize_angle(libm::atan2(d.y, d.x) - r.heading).clamp(-max_turn, max_turn)
                } else {
                    0.0
                }
            }
            Look::Spin(rate) => (rate * dt).clamp(-max_turn, max_turn),
        };
        r.heading = normalize_angle(r.heading + turn);
    }

    separate(&mut world.robots, phys.min_separation, cfg.field.clip_bounds());

    for (r, (p0, h0)) in world.robots.iter_mut().zip(before) {
        let d = r.position - p0;
        let (s, c) = (libm::sin(h0), libm::cos(h0));
        r.odometry = Odometry {
            forward: c * d.x + s * d.y,
            left: -s * d.x + c * d.y,
            turn: normalize_angle(r.heading - h0),
        };
    }

    let mut outcome = StepOutcome::default();
    let ball = world.ball.position;
    let can_kick = world.ball.kick_lock == 0;
    world.ball.kick_lock = world.ball.kick_lock.saturating_sub(1);
    let kicker = world
        .robots
        .iter()
        .zip(commands)
        .enumerate()
        .filter(|(_, (r, c))| can_kick && c.kicks && r.position.distance(ball) <= phys.kick_range)
        .min_by(|(_, (a, _)), (_, (b, _))| a.position.distance(ball).total_cmp(&b.position.distance(ball)))
        .map(|(i, _)| i);
    if let Some(i) = kicker {
        let goal = match world.robots[i].team {
            Team::Ours => cfg.field.opponent_goal(),
            Team::Theirs => cfg.field.own_goal(),
        };
        let aim = goal - ball;
        let noise: f64 = rng.sample(StandardNormal);
        let angle = libm::atan2(aim.y, aim.x) + phys.kick_spread * noise;
        world.ball.velocity = Point2::new(libm::cos(angle), libm::sin(angle)) * phys.kick_speed;
        world.ball.kick_lock = libm::round(phys.kick_recovery / dt) as u32;
        outcome.kicker = Some(i);
    }

    let (p, v) = roll(world.ball.position, world.ball.velocity, phys.ball_friction, dt);
    world.ball.position = p;
    world.ball.velocity = v;

    let (hl, hw) = (cfg.field.half_length(), cfg.field.half_width());
    let p = world.ball.position;
    if p.x.abs() > hl && p.y.abs() <= 0.5 * phys.goal_width {
        outcome.goal = Some(if p.x > 0.0 { Team::Ours } else { Team::Theirs });
        world.ball = BallState::at_rest(Point2::ORIGIN);
    } else if p.x.abs() > hl || p.y.abs() > hw {
        // Out of play: put it back just inside the line.
        let inside = Bounds::field(cfg.field.length - 0.4, cfg.field.width - 0.4, 0.0);
        world.ball = BallState::at_rest(inside.clamp(p));
    }

    world.ticks += 1;
    world.clock = world.ticks as f64 * dt;
    outcome
}

/// Pushes overlapping robots apart, half each, for a few sweeps.
fn separate(robots: &mut [SimRobot], min_sep: f64, bounds: Bounds) {
    if min_sep <= 0.0 {
        return;
    }
    for _ in 0..3 {
        let mut moved = false;
        for i in 0..robots.len() {
            for j in i + 1..robots.len() {
                let d = robots[j].position - robots[i].position;
                let dist = d.norm();
                if dist >= min_sep {
                    continue;
                }
                let dir = if dist > 1e-12 {
                    d * (1.0 / dist)
                } else {
                    let a = j as f64;
                    Point2::new(libm::cos(a), libm::sin(a))
                };
                let push = dir * (0.5 * (min_sep - dist));
                robots[i].position = bounds.clamp(robots[i].position - push);
                robots[j].position = bounds.clamp(robots[j].position + push);
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quiet_world(cfg: &SimConfig) -> WorldState {
        let mut w = WorldState::kickoff(cfg);
        w.ball.position = Point2::new(0.0, 2.5);
        w
    }

    #[test]
    fn holding_still_moves_nothing_but_the_ball() {
        let cfg = SimConfig::default();
        let mut w = quiet_world(&cfg);
        w.ball.velocity = Point2::new(0.5, 0.0);
        let before = w.clone();
        let cmds: Vec<_> = w.robots.iter().map(Command::hold).collect();
        step(&mut w, &cmds, &cfg, &mut ChaCha8Rng::seed_from_u64(0));
        for (a, b) in w.robots.iter().zip(&before.robots) {
            assert_eq!(a.position, b.position);
            assert_eq!(a.heading, b.heading);
        }
        assert_ne!(w.ball, before.ball);
    }

    #[test]
    fn walking_speed() {
        let cfg = SimConfig::default();
        let mut w = quiet_world(&cfg);
        let start = w.robots[3].position;
        let target = start + Point2::new(0.0, -1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..10 {
            let mut cmds: Vec<_> = w.robots.iter().map(Command::hold).collect();
            cmds[3].target = target;
            step(&mut w, &cmds, &cfg, &mut rng);
        }
        // 10 ticks × 0.05 s × 0.3 m/s.
        assert!((w.robots[3].position.distance(start) - 0.15).abs() < 1e-12);
        assert!((w.robots[3].position.x - start.x).abs() < 1e-12);
        assert!((w.robots[3].odometry.left + 0.015).abs() < 1e-12);
    }

    #[test]
    fn ball_rolls_out_after_two_and_a_half_seconds() {
        let cfg = SimConfig::default();
        let mut w = quiet_world(&cfg);
        w.ball.position = Point2::new(-1.0, 2.5);
        w.ball.velocity = Point2::new(1.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let cmds: Vec<_> = w.robots.iter().map(Command::hold).collect();
        for _ in 0..49 {
            step(&mut w, &cmds, &cfg, &mut rng);
        }
        assert!(w.ball.velocity.x > 0.0);
        step(&mut w, &cmds, &cfg, &mut rng);
        assert_eq!(w.ball.velocity, Point2::ORIGIN);
        // v²/(2μ) = 1/0.8.
        assert!((w.ball.position.x - (-1.0 + 1.25)).abs() < 1e-9);
    }

    #[test]
    fn robots_keep_their_distance() {
        let cfg = SimConfig::default();
        let mut w = quiet_world(&cfg);
        let mut cmds: Vec<_> = w.robots.iter().map(Command::hold).collect();
        cmds[3].target = w.robots[4].position;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..200 {
            step(&mut w, &cmds, &cfg, &mut rng);
        }
        assert!(w.robots[3].position.distance(w.robots[4].position) >= 0.3 - 1e-9);
    }

    #[test]
    fn kick_into_the_goal() {
        let mut cfg = SimConfig::default();
        cfg.physics.kick_spread = 0.0;
        let mut w = quiet_world(&cfg);
        w.ball.position = Point2::new(3.5, 0.0);
        w.robots[1].position = Point2::new(3.4, 0.0);
        let mut cmds: Vec<_> = w.robots.iter().map(Command::hold).collect();
        cmds[1].kicks = true;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let first = step(&mut w, &cmds, &cfg, &mut rng);
        assert_eq!(first.kicker, Some(1));
        cmds[1].kicks = false;
        let goal = (0..40).find_map(|_| step(&mut w, &cmds, &cfg, &mut rng).goal);
        assert_eq!(goal, Some(Team::Ours));
        assert_eq!(w.ball.position, Point2::ORIGIN);
    }
}
