//! Approximately solving matrix games with an improper best-response oracle.
//!
//! cargo run --release --example zero_sum_game

use agnostic_boost::games::{
    certify_solution, game_value_grid, solve_improper_game, MatrixGame, OracleSpec,
};
use agnostic_boost::oco::OgdFactory;
use agnostic_boost::rng::RngStream;

fn main() -> agnostic_boost::Result<()> {
    let rounds = 10_000;

    let pennies = MatrixGame::matching_pennies();
    let sol = solve_improper_game(&pennies, &mut OracleSpec::exact(), &OgdFactory, rounds)?;
    let value = game_value_grid(&pennies, 100)?;
    let cert = certify_solution(&pennies, &sol.q_bar, rounds, 0.0, &value);
    println!("matching pennies: q_bar = {:.3?}", sol.q_bar);
    println!("  {cert:#?}");

    // the row player mixes (p, 1 - p); value 5/3
    let game =
        MatrixGame::two_row_mixed([vec![3.0, 1.0], vec![1.0, 2.0]])?.with_improper_scale(1.5)?;
    let mut oracle = OracleSpec::noisy(0.05, RngStream::new(7, 1))?;
    let sol = solve_improper_game(&game, &mut oracle, &OgdFactory, rounds)?;
    let value = game_value_grid(&game, 300)?;
    let cert = certify_solution(&game, &sol.q_bar, rounds, 0.05, &value);
    println!(
        "[[3,1],[1,2]] with a noisy, scaled oracle: q_bar = {:.3?}, guaranteed {:.4} >= {:.4}: {}",
        sol.q_bar, cert.min_payoff, cert.threshold, cert.passed
    );
    Ok(())
}
