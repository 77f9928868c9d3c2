//! End-to-end solves of small problems with known closed-form optima.

use minisdp::{parse_problem, solve, write_solution, Options, Status};

/// Two constraints of the shape `λ − s_k = d_k` with objective `max −λ`:
/// the optimum is `λ = max d_k = 7/10`.
const BOUND_LP: &str = "\
2
2
-1 -2
0.3 0.7
0 1 1 1 -1.0
1 1 1 1 1.0
1 2 1 1 -1.0
2 1 1 1 1.0
2 2 2 2 -1.0
";

#[test]
fn bound_shaped_lp_reaches_the_larger_density() {
    let p = parse_problem(BOUND_LP).unwrap();
    let sol = solve(&p, &Options::default()).unwrap();
    assert_eq!(sol.status, Status::Optimal, "status: {:?}", sol);
    assert!(
        (sol.primal_objective + 0.7).abs() < 1e-6,
        "primal {} should be -0.7",
        sol.primal_objective
    );
    assert!((sol.dual_objective + 0.7).abs() < 1e-6);
    // λ lives in block 1; the easy slack is s_1 = 0.4, the tight one s_2 = 0.
    let lambda = match &sol.x.blocks[0] {
        minisdp::linalg::Block::Diag { data } => data[0],
        _ => unreachable!(),
    };
    assert!((lambda - 0.7).abs() < 1e-6, "lambda {lambda}");
    let slacks = match &sol.x.blocks[1] {
        minisdp::linalg::Block::Diag { data } => data.clone(),
        _ => unreachable!(),
    };
    assert!((slacks[0] - 0.4).abs() < 1e-6);
    assert!(slacks[1].abs() < 1e-6);
    // Dual: min 0.3·y1 + 0.7·y2 with y ≤ 0 and y1 + y2 ≥ −1.
    assert!(sol.y[0].abs() < 1e-5, "y = {:?}", sol.y);
    assert!((sol.y[1] + 1.0).abs() < 1e-5, "y = {:?}", sol.y);
}

/// `max 2·x_12` over 2×2 PSD matrices with unit diagonal: optimum 2 at the
/// all-ones matrix.
const CORRELATION: &str = "\
2
1
2
1.0 1.0
0 1 1 2 1.0
1 1 1 1 1.0
2 1 2 2 1.0
";

#[test]
fn dense_block_pushes_to_the_psd_boundary() {
    let p = parse_problem(CORRELATION).unwrap();
    let sol = solve(&p, &Options::default()).unwrap();
    assert_eq!(sol.status, Status::Optimal);
    assert!((sol.primal_objective - 2.0).abs() < 1e-6);
    let x = match &sol.x.blocks[0] {
        minisdp::linalg::Block::Dense { data, .. } => data.clone(),
        _ => unreachable!(),
    };
    for v in x {
        assert!((v - 1.0).abs() < 1e-5, "X should be all ones, got {v}");
    }
}

/// `max −x − 2y` s.t. `x + y = 1`, `x, y ≥ 0` over two 1×1 diagonal blocks:
/// optimum −1 at `(x, y) = (1, 0)`.
const DIAG_LP: &str = "\
1
2
-1 -1
1.0
0 1 1 1 -1.0
0 2 1 1 -2.0
1 1 1 1 1.0
1 2 1 1 1.0
";

#[test]
fn mixed_diagonal_blocks_solve_a_transport_toy() {
    let p = parse_problem(DIAG_LP).unwrap();
    let sol = solve(&p, &Options::default()).unwrap();
    assert_eq!(sol.status, Status::Optimal);
    assert!((sol.primal_objective + 1.0).abs() < 1e-6);
}

#[test]
fn solutions_replay_the_constraints() {
    for text in [BOUND_LP, CORRELATION, DIAG_LP] {
        let p = parse_problem(text).unwrap();
        let sol = solve(&p, &Options::default()).unwrap();
        for (k, a) in p.constraints.iter().enumerate() {
            let residual = sol.x.trace_sparse(a) - p.b[k];
            assert!(
                residual.abs() < 1e-6,
                "constraint {} violated by {residual:e}",
                k + 1
            );
        }
        // The dual matrix must agree with Σ y_k A_k − C.
        let mut lhs = minisdp::linalg::BlockMat::zeros(&p.block_sizes);
        for (k, a) in p.constraints.iter().enumerate() {
            lhs.add_sparse(a, sol.y[k]);
        }
        lhs.add_sparse(&p.c, -1.0);
        lhs.scale_add(1.0, &sol.z, -1.0);
        assert!(lhs.frob_norm() < 1e-6, "dual residual {:e}", lhs.frob_norm());
    }
}

#[test]
fn zero_row_with_nonzero_rhs_is_rejected() {
    let text = "\
1
1
-1
1.0
0 1 1 1 -1.0
";
    let p = parse_problem(text).unwrap();
    let err = solve(&p, &Options::default()).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("constraint 1"), "{msg}");
}

#[test]
fn written_solutions_carry_both_matrices() {
    let p = parse_problem(CORRELATION).unwrap();
    let sol = solve(&p, &Options::default()).unwrap();
    let mut out = Vec::new();
    write_solution(&mut out, &sol).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    let y_line = lines.next().unwrap();
    assert_eq!(y_line.split_whitespace().count(), 2);
    // Upper triangle of a 2×2 block, for Z and for X: three entries each.
    let entries: Vec<&str> = lines.collect();
    assert_eq!(entries.len(), 6);
    assert!(entries.iter().all(|l| l.split_whitespace().count() == 5));
    let x12: f64 = entries
        .iter()
        .find(|l| l.starts_with("2 1 1 2"))
        .unwrap()
        .split_whitespace()
        .last()
        .unwrap()
        .parse()
        .unwrap();
    assert!((x12 - 1.0).abs() < 1e-5);
}
