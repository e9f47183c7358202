//! Search dynamics against independent oracles: an exact absorbing-chain
//! solution for independent walkers and a second, naive simulator.

use nkcoop::analytics::{aggregate, analytic_independent_cost};
use nkcoop::landscape::{generate_landscape, Landscape};
use nkcoop::network::Network;
use nkcoop::search::{run_search, SearchConfig};
use rand::{Rng, SeedableRng};

/// Expected operations until one of `walkers` independent single-bit-flip
/// walkers on the `n`-cube first hits a fixed vertex, starting from uniform
/// positions. Solved exactly on the product chain of Hamming distances.
fn exact_independent_operations(n: usize, walkers: u32) -> f64 {
    let states = n.pow(walkers);
    let decode = |mut s: usize| -> Vec<usize> {
        (0..walkers)
            .map(|_| {
                let d = s % n + 1;
                s /= n;
                d
            })
            .collect()
    };
    let encode = |ds: &[usize]| ds.iter().rev().fold(0, |acc, &d| acc * n + (d - 1));

    // (I - P) h = 1 over transient states, dense Gaussian elimination
    let mut a = vec![vec![0.0f64; states + 1]; states];
    for s in 0..states {
        a[s][s] += 1.0;
        a[s][states] = 1.0;
        let ds = decode(s);
        for w in 0..walkers as usize {
            let d = ds[w];
            let pick = 1.0 / walkers as f64;
            if d > 1 {
                let mut next = ds.clone();
                next[w] = d - 1;
                a[s][encode(&next)] -= pick * d as f64 / n as f64;
            }
            if d < n {
                let mut next = ds.clone();
                next[w] = d + 1;
                a[s][encode(&next)] -= pick * (n - d) as f64 / n as f64;
            }
        }
    }
    for col in 0..states {
        let pivot = (col..states)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        for row in 0..states {
            if row != col {
                let f = a[row][col] / a[col][col];
                if f != 0.0 {
                    for c in col..=states {
                        a[row][c] -= f * a[col][c];
                    }
                }
            }
        }
    }
    let h: Vec<f64> = (0..states).map(|s| a[s][states] / a[s][s]).collect();

    let binom = |d: usize| -> f64 {
        let mut c = 1.0;
        for j in 0..d {
            c = c * (n - j) as f64 / (j + 1) as f64;
        }
        c / 2f64.powi(n as i32)
    };
    (0..states)
        .map(|s| {
            let ds = decode(s);
            ds.iter().map(|&d| binom(d)).product::<f64>() * h[s]
        })
        .sum()
}

#[test]
fn exact_chain_single_walker_matches_mean_hitting_time() {
    // a lone walker started at distance 1 on the 2-cube needs 3 operations on average
    // from distance 2: h2 = 1 + h1, h1 = 1 + h2/2  =>  h1 = 3, h2 = 4
    let expected = 0.5 * 3.0 + 0.25 * 4.0;
    assert!((exact_independent_operations(2, 1) - expected).abs() < 1e-12);
}

fn simulated_costs(
    landscape: &Landscape,
    network: &Network,
    p: &[f64],
    runs: u64,
    seed0: u64,
) -> Vec<f64> {
    (0..runs)
        .map(|r| {
            let config = SearchConfig::new(landscape, network, p.to_vec(), seed0 + r)
                .unwrap()
                .with_max_sweeps(None);
            let res = run_search(&config).unwrap();
            assert!(res.halted);
            res.cost
        })
        .collect()
}

#[test]
fn independent_walkers_match_exact_chain() {
    for (n, agents) in [(4usize, 3usize), (6, 2), (5, 1)] {
        let landscape = generate_landscape(n, 1, 21).unwrap();
        let network = Network::complete(agents);
        let costs = simulated_costs(&landscape, &network, &vec![0.0; agents], 20_000, 1);
        let est = aggregate(&costs, 0).unwrap();
        let exact = exact_independent_operations(n, agents as u32) / 2f64.powi(n as i32);
        assert!(
            (est.mean - exact).abs() < 3.0 * est.std_error,
            "N={n} L={agents}: simulated {} ± {}, exact {exact}",
            est.mean,
            est.std_error
        );
    }
}

#[test]
fn closed_form_cost_converges_with_string_length() {
    // the closed form is asymptotic in N; its error against the exact chain shrinks
    let errors: Vec<f64> = [4usize, 6, 8, 12, 16]
        .iter()
        .map(|&n| {
            let exact = exact_independent_operations(n, 1) / 2f64.powi(n as i32);
            let closed = analytic_independent_cost(n, 1).unwrap();
            (closed - exact).abs() / exact
        })
        .collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    assert!(errors[4] < 1e-3, "{errors:?}");

    let exact = exact_independent_operations(6, 3) / 64.0;
    let closed = analytic_independent_cost(6, 3).unwrap();
    assert!((closed - exact).abs() / exact < 0.1);
}

fn direct_fitness(landscape: &Landscape, x: u32) -> f64 {
    let n = landscape.n();
    let k = landscape.k();
    (0..n)
        .map(|i| {
            let idx = (0..=k).fold(0usize, |acc, j| {
                acc | ((((x >> ((i + j) % n)) & 1) as usize) << j)
            });
            landscape.component(i)[idx]
        })
        .sum::<f64>()
        / n as f64
}

/// Straightforward re-implementation of the imitative search.
fn naive_search(landscape: &Landscape, network: &Network, p: &[f64], rng: &mut impl Rng) -> u64 {
    let n = landscape.n();
    let target = (0..1u32 << n)
        .max_by(|&a, &b| direct_fitness(landscape, a).total_cmp(&direct_fitness(landscape, b)))
        .unwrap();
    let mut strings: Vec<u32> = (0..network.node_count())
        .map(|_| rng.random_range(0..1u32 << n))
        .collect();
    if strings.contains(&target) {
        return 0;
    }
    let mut ops = 0;
    loop {
        ops += 1;
        let i = rng.random_range(0..strings.len());
        let mut imitated = false;
        if rng.random_bool(p[i]) && network.degree(i) > 0 {
            let fit: Vec<(usize, f64)> = network
                .neighbors(i)
                .iter()
                .map(|&j| (j, direct_fitness(landscape, strings[j])))
                .collect();
            let best = fit.iter().map(|f| f.1).fold(f64::MIN, f64::max);
            let tied: Vec<usize> = fit.iter().filter(|f| f.1 == best).map(|f| f.0).collect();
            let model = tied[rng.random_range(0..tied.len())];
            let differing: Vec<usize> = (0..n)
                .filter(|&b| (strings[i] ^ strings[model]) >> b & 1 == 1)
                .collect();
            if !differing.is_empty() {
                strings[i] ^= 1 << differing[rng.random_range(0..differing.len())];
                imitated = true;
            }
        }
        if !imitated {
            strings[i] ^= 1 << rng.random_range(0..n);
        }
        if strings[i] == target {
            return ops;
        }
    }
}

fn compare_with_naive(landscape: &Landscape, network: &Network, p: &[f64], runs: u64) {
    let ours = aggregate(&simulated_costs(landscape, network, p, runs, 500), 0).unwrap();
    let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
    let size = 2f64.powi(landscape.n() as i32);
    let naive: Vec<f64> = (0..runs)
        .map(|_| naive_search(landscape, network, p, &mut rng) as f64 / size)
        .collect();
    let naive = aggregate(&naive, 0).unwrap();
    assert!(
        ours.agrees_with(&naive, 3.0),
        "library {} ± {}, naive {} ± {}",
        ours.mean,
        ours.std_error,
        naive.mean,
        naive.std_error
    );
}

#[test]
fn matches_naive_simulator_on_complete_graph() {
    let landscape = generate_landscape(4, 1, 8).unwrap();
    compare_with_naive(&landscape, &Network::complete(5), &[0.5; 5], 20_000);
}

#[test]
fn matches_naive_simulator_on_sparse_heterogeneous_group() {
    let landscape = generate_landscape(8, 3, 3).unwrap();
    let network =
        Network::from_edges(7, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5), (5, 6)]).unwrap();
    let p = [0.9, 0.2, 0.6, 0.0, 1.0, 0.75, 0.4];
    compare_with_naive(&landscape, &network, &p, 8_000);
}
