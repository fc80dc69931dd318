//! Shared oracles for the integration tests.

#![allow(dead_code)]

use tnet::exact::{OpSum, ProductTerm};
use tnet::mpo::PLAQUETTE9_OPS;

/// Hamiltonian of a builtin 1D rule set, assembled term by term.
pub fn builtin_terms_1d(name: &str, n: usize) -> OpSum {
    let mut s = OpSum::new(n, 2);
    match name {
        "tfim1d" => {
            for i in 0..n - 1 {
                s.push(ProductTerm::pauli_string(-1.0, &[(i, 'X'), (i + 1, 'X')]));
            }
            for i in 0..n {
                s.push(ProductTerm::pauli_string(-1.0, &[(i, 'Z')]));
            }
        }
        "heisenberg1d" => {
            for i in 0..n - 1 {
                for p in ['X', 'Y', 'Z'] {
                    s.push(ProductTerm::pauli_string(-1.0, &[(i, p), (i + 1, p)]));
                }
            }
            for i in 0..n {
                s.push(ProductTerm::pauli_string(-1.0, &[(i, 'Z')]));
            }
        }
        "cluster1d" => {
            for i in 0..n.saturating_sub(2) {
                s.push(ProductTerm::pauli_string(1.0, &[(i, 'Z'), (i + 1, 'X'), (i + 2, 'Z')]));
            }
        }
        _ => panic!("not a 1D builtin: {name}"),
    }
    s
}

/// Hamiltonian of a builtin 2D rule set on a `w × h` lattice, placing every
/// pattern that fits inside the lattice. Sites are row-major.
pub fn builtin_terms_2d(name: &str, w: usize, h: usize) -> OpSum {
    let site = |r: usize, c: usize| r * w + c;
    let mut s = OpSum::new(w * h, 2);
    let mut add = |coef: f64, ops: Vec<(usize, char)>| s.push(ProductTerm::pauli_string(coef, &ops));
    for r in 0..h {
        for c in 0..w {
            match name {
                "field2d" => add(1.0, vec![(site(r, c), 'Z')]),
                "plaquette9" => {
                    if r + 3 <= h && c + 3 <= w {
                        let mut ops = Vec::new();
                        for (dr, row) in PLAQUETTE9_OPS.iter().enumerate() {
                            for (dc, &p) in row.iter().enumerate() {
                                ops.push((site(r + dr, c + dc), p));
                            }
                        }
                        add(1.0, ops);
                    }
                }
                "wen_toric" => {
                    if r + 1 < h && c + 1 < w {
                        add(
                            1.0,
                            vec![
                                (site(r, c), 'X'),
                                (site(r, c + 1), 'Y'),
                                (site(r + 1, c), 'Y'),
                                (site(r + 1, c + 1), 'X'),
                            ],
                        );
                    }
                }
                "compass" => {
                    if c + 1 < w {
                        add(1.0, vec![(site(r, c), 'X'), (site(r, c + 1), 'X')]);
                    }
                    if r + 1 < h {
                        add(1.0, vec![(site(r, c), 'Y'), (site(r + 1, c), 'Y')]);
                    }
                }
                "tfim2d" => {
                    add(1.0, vec![(site(r, c), 'Z')]);
                    if c + 1 < w {
                        add(-1.0, vec![(site(r, c), 'X'), (site(r, c + 1), 'X')]);
                    }
                    if r + 1 < h {
                        add(-1.0, vec![(site(r, c), 'X'), (site(r + 1, c), 'X')]);
                    }
                }
                "cluster2d" => {
                    // X at (r, c) with Z on its four neighbours
                    if r >= 1 && r + 1 < h && c >= 1 && c + 1 < w {
                        add(
                            1.0,
                            vec![
                                (site(r - 1, c), 'Z'),
                                (site(r, c - 1), 'Z'),
                                (site(r, c), 'X'),
                                (site(r, c + 1), 'Z'),
                                (site(r + 1, c), 'Z'),
                            ],
                        );
                    }
                }
                _ => panic!("not a 2D builtin: {name}"),
            }
        }
    }
    s
}
