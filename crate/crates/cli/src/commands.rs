use std::fs;
use std::io::Write;
use std::path::Path;

use qdburst::heterogeneous::{
    build_group_bound, convolve_groups, evaluate_group, evaluate_group_exact, truncate_to_total, union_bound_combine,
    GroupMethod,
};
use qdburst::homogeneous::{
    dkw_nontrivial_threshold, exact_quasi_det_burst, quasi_det_burst, same_period_dkw_curve, same_period_exact_curve,
};
use qdburst::rational::{format_rational, parse_rational, to_f64, Rational};
use qdburst::simulator::{events_per_hyperperiod, monte_carlo_tail};
use qdburst::{validate_scenario, FlowGroupSpec, Scenario, ScenarioSpec};

use crate::table::{Cell, Table};
use crate::{CliError, Combiners, Command, GridArgs, Method, Methods, OutputArgs, SimArgs};

/// Arrivals per hyperperiod above which a simulation run gets a cost warning.
const SLOW_SIMULATION_EVENTS: u128 = 10_000;

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::BoundDkw { input, grid, output } => {
            let s = load_scenario(&input.scenario)?;
            let group = single_group(&s, "bound-dkw")?;
            let grid = grid_points(&s, grid)?;
            warn_trivial_dkw(&s, &grid);
            let curve = evaluate_group(group, &s.quantum, GroupMethod::Dkw, &grid)?;
            let mut table = Table::new(vec!["b", "eps_dkw"]);
            for (k, e) in curve.grid.iter().zip(&curve.eps) {
                table.push(vec![burst_cell(&s, *k), Cell::Prob(*e)]);
            }
            emit(&table, &output)
        }
        Command::BoundExact { input, grid, output, rational } => {
            let s = load_scenario(&input.scenario)?;
            let group = single_group(&s, "bound-exact")?;
            let grid = grid_points(&s, grid)?;
            let curve = evaluate_group_exact(group, &s.quantum, &grid)?;
            let mut table = Table::new(vec!["b", "eps_exact"]);
            for (k, e) in curve.grid.iter().zip(&curve.eps) {
                table.push(vec![burst_cell(&s, *k), prob_cell(e, rational)]);
            }
            emit(&table, &output)
        }
        Command::BurstForEps { eps, flows, packet_size, scenario, method, output } => {
            let (flows, size) = match (flows.is_empty(), scenario) {
                (false, _) => (flows, parse_rational(&packet_size)?),
                (true, Some(path)) => {
                    let s = load_scenario(&path)?;
                    let g = single_group(&s, "burst-for-eps")?;
                    (vec![g.count], g.packet_size.clone())
                }
                (true, None) => return Err(CliError::arg("burst-for-eps needs --flows or --scenario")),
            };
            emit(&burst_table(&flows, &size, eps, method)?, &output)
        }
        Command::SamePeriod { input, grid, method, rational, output } => {
            let s = load_scenario(&input.scenario)?;
            let sizes = s.same_period_sizes()?;
            let grid = grid_points(&s, grid)?;
            let mut columns = vec!["b"];
            let dkw = if method.dkw() {
                columns.push("eps_dkw");
                Some(same_period_dkw_curve(&sizes, &s.quantum, &grid)?)
            } else {
                None
            };
            let exact = if method.exact() {
                columns.push("eps_exact");
                Some(same_period_exact_curve(&sizes, &s.quantum, &grid)?)
            } else {
                None
            };
            let mut table = Table::new(columns);
            for (i, k) in grid.iter().enumerate() {
                let mut row = vec![burst_cell(&s, *k)];
                if let Some(c) = &dkw {
                    row.push(Cell::Prob(c.eps[i]));
                }
                if let Some(c) = &exact {
                    row.push(prob_cell(&c.eps[i], rational));
                }
                table.push(row);
            }
            emit(&table, &output)
        }
        Command::Combine { input, grid, method, combiner, output } => {
            let s = load_scenario(&input.scenario)?;
            let grid = grid_points(&s, grid)?;
            if method == Method::Dkw {
                warn_trivial_dkw(&s, &grid);
            }
            let group_method = match method {
                Method::Dkw => GroupMethod::Dkw,
                Method::Exact => GroupMethod::Exact,
            };
            let bounds = s
                .groups
                .iter()
                .map(|g| build_group_bound(g, &s.quantum, group_method))
                .collect::<Result<Vec<_>, _>>()?;
            let mut columns = vec!["b"];
            let mut curves = Vec::new();
            if combiner != Combiners::Union {
                columns.push("eps_conv");
                curves.push(truncate_to_total(convolve_groups(&bounds)?, &s));
            }
            if combiner != Combiners::Conv {
                columns.push("eps_union");
                curves.push(truncate_to_total(union_bound_combine(&bounds)?, &s));
            }
            let mut table = Table::new(columns);
            for k in &grid {
                let mut row = vec![burst_cell(&s, *k)];
                row.extend(curves.iter().map(|c| Cell::Prob(c.value_at(*k))));
                table.push(row);
            }
            emit(&table, &output)
        }
        Command::Simulate { input, grid, sim, output } => {
            let s = load_scenario(&input.scenario)?;
            let grid = grid_points(&s, grid)?;
            let mut table = Table::new(vec!["b", "tail_emp", "band"]);
            let tail = simulate(&s, &grid, sim)?;
            for (i, k) in grid.iter().enumerate() {
                table.push(vec![burst_cell(&s, *k), Cell::Prob(tail.tail[i]), Cell::Prob(tail.band_halfwidth)]);
            }
            emit(&table, &output)
        }
        Command::Figure(args) => crate::figure::run(args),
    }
}

fn io_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io { path: path.display().to_string(), source }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    Ok(validate_scenario(&ScenarioSpec::from_json(&text)?)?)
}

fn single_group<'a>(s: &'a Scenario, command: &str) -> Result<&'a FlowGroupSpec, CliError> {
    match s.groups.as_slice() {
        [g] => Ok(g),
        _ => Err(CliError::arg(format!(
            "{command} needs a single-group scenario, got {} groups; use combine",
            s.groups.len()
        ))),
    }
}

pub fn grid_points(s: &Scenario, grid: GridArgs) -> Result<Vec<u64>, CliError> {
    let b_max = grid.b_max.unwrap_or_else(|| s.grid_len());
    if grid.step == 0 {
        return Err(CliError::arg("--step must be >= 1"));
    }
    if grid.b_min > b_max {
        return Err(CliError::arg(format!("--b-min {} exceeds --b-max {b_max}", grid.b_min)));
    }
    Ok((grid.b_min..=b_max).step_by(grid.step as usize).collect())
}

pub fn burst_cell(s: &Scenario, k: u64) -> Cell {
    Cell::Text(format_rational(&s.burst_at(k)))
}

fn prob_cell(p: &Rational, rational: bool) -> Cell {
    if rational {
        Cell::Text(format_rational(p))
    } else {
        Cell::Prob(to_f64(p))
    }
}

/// Notes, per group, the bursts below which the dkw bound is identically one.
pub fn warn_trivial_dkw(s: &Scenario, grid: &[u64]) {
    let Some(&first) = grid.first() else { return };
    let lowest = to_f64(&s.burst_at(first));
    for (i, g) in s.groups.iter().enumerate() {
        if g.count < 2 {
            continue;
        }
        let edge = dkw_nontrivial_threshold(g.count) * to_f64(&g.packet_size);
        if lowest < edge {
            eprintln!("warning: group {i}: dkw bound is trivial (= 1) for b < {edge:.6}");
        }
    }
}

pub fn simulate(s: &Scenario, grid: &[u64], sim: SimArgs) -> Result<qdburst::simulator::EmpiricalTail, CliError> {
    let events = events_per_hyperperiod(s);
    if events > SLOW_SIMULATION_EVENTS {
        eprintln!("warning: {events} arrivals per hyperperiod; each trial scans two hyperperiods");
    }
    Ok(monte_carlo_tail(s, sim.trials, sim.seed, grid, sim.alpha)?)
}

pub fn burst_table(flows: &[u64], size: &Rational, eps: f64, method: Methods) -> Result<Table, CliError> {
    let mut columns = vec!["n"];
    if method.dkw() {
        columns.push("burst_dkw");
    }
    if method.exact() {
        columns.push("burst_exact");
    }
    columns.push("burst_det");
    let mut table = Table::new(columns);
    for &n in flows {
        let mut row = vec![Cell::Int(n)];
        if method.dkw() {
            row.push(Cell::Text(format_rational(&quasi_det_burst(n, size, eps)?)));
        }
        if method.exact() {
            row.push(Cell::Text(format_rational(&exact_quasi_det_burst(n, size, eps)?)));
        }
        row.push(Cell::Text(format_rational(&(size * Rational::from_integer(n.into())))));
        table.push(row);
    }
    Ok(table)
}

pub fn emit(table: &Table, output: &OutputArgs) -> Result<(), CliError> {
    match &output.output {
        Some(path) => write_file(table, output.format, path),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            table
                .write_to(output.format, &mut lock)
                .and_then(|_| lock.flush())
                .map_err(|e| io_error(Path::new("<stdout>"), e))
        }
    }
}

pub fn write_file(table: &Table, format: crate::table::Format, path: &Path) -> Result<(), CliError> {
    fs::write(path, table.render(format)).map_err(|e| io_error(path, e))
}
