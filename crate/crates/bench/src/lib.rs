//! Seeded inputs shared by the benchmarks.

use kreinkit::fixpoint::GroupRep;
use kreinkit::fixtures;
use kreinkit::group::FiniteGroup;
use kreinkit::qpd::GroupFunction;
use kreinkit::{BallPoint, BlockOperator, IndefiniteSpace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn strongly_dissipative(n_minus: usize, n_plus: usize) -> BlockOperator {
    let space = IndefiniteSpace::new(n_minus, n_plus).expect("nonempty signature");
    fixtures::random_strongly_dissipative(space, &mut rng(1))
}

pub fn ball_pair(n_minus: usize, n_plus: usize) -> (BallPoint, BallPoint) {
    let space = IndefiniteSpace::new(n_minus, n_plus).expect("nonempty signature");
    let mut r = rng(2);
    (
        fixtures::random_ball_point(space, 0.7, &mut r),
        fixtures::random_ball_point(space, 0.7, &mut r),
    )
}

pub fn conjugated_rep(group: &str, n_minus: usize, n_plus: usize) -> GroupRep {
    let g = FiniteGroup::by_name(group).expect("known group");
    let space = IndefiniteSpace::new(n_minus, n_plus).expect("nonempty signature");
    fixtures::conjugated_rep_fixture(&g, space, 0.5, &mut rng(3))
        .expect("fixture")
        .0
}

pub fn qpd_function(group: &str, k: usize) -> GroupFunction {
    let g = FiniteGroup::by_name(group).expect("known group");
    fixtures::qpd_fixture(&g, k, &mut rng(4))
        .expect("fixture")
        .0
}
