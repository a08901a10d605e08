//! One function per subcommand; each turns a [`RunConfig`] into a [`Report`]
//! and, for the simulation commands, a trajectory.

use std::f64::consts::{E, FRAC_PI_2};
use std::fmt;
use std::io::Write;

use clap::ValueEnum;
use log::info;
use seirs::linearization::spectral_stability;
use seirs::stochastic::{critical_epsilon, lyapunov_margin, lyapunov_threshold};
use seirs::*;

use crate::config::{Method, RunConfig};
use crate::error::CliError;
use crate::report::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Equilibria,
    Simulate,
    SimulateSde,
    Stability,
    DelayMargin,
    Concentration,
    Lyapunov,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Equilibria => "equilibria",
            Command::Simulate => "simulate",
            Command::SimulateSde => "simulate-sde",
            Command::Stability => "stability",
            Command::DelayMargin => "delay-margin",
            Command::Concentration => "concentration",
            Command::Lyapunov => "lyapunov",
        }
    }

    fn uses_ensemble(&self) -> bool {
        matches!(self, Command::SimulateSde | Command::Concentration | Command::Lyapunov)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub struct Output {
    pub report: Report,
    pub trajectory: Option<Trajectory64>,
}

pub const VERDICT_ALL_ADMISSIBLE: &str = "stable for all admissible delays";

pub fn run(command: Command, cfg: &RunConfig) -> Result<Output, CliError> {
    let mut report = Report::new(command.name());
    echo_inputs(&mut report, command, cfg);
    info!("running {command}");
    let trajectory = match command {
        Command::Equilibria => {
            equilibria_report(&mut report, &cfg.params);
            None
        }
        Command::Simulate => Some(simulate(&mut report, cfg)?),
        Command::SimulateSde => Some(simulate_sde_cmd(&mut report, cfg)?),
        Command::Stability => {
            stability(&mut report, &cfg.params)?;
            None
        }
        Command::DelayMargin => {
            delay_margin(&mut report, &cfg.params)?;
            None
        }
        Command::Concentration => {
            concentration(&mut report, cfg)?;
            None
        }
        Command::Lyapunov => {
            lyapunov(&mut report, cfg)?;
            None
        }
    };
    Ok(Output { report, trajectory })
}

fn echo_inputs(report: &mut Report, command: Command, cfg: &RunConfig) {
    let p = &cfg.params;
    for (k, v) in [
        ("beta", p.beta),
        ("mu", p.mu),
        ("gamma", p.gamma),
        ("k_r", p.k_r),
        ("r", p.r),
        ("epsilon", p.epsilon),
    ] {
        report.real(format!("input.params.{k}"), v);
    }
    if matches!(command, Command::Equilibria | Command::Stability | Command::DelayMargin) {
        return;
    }
    let ic = &cfg.initial;
    for (k, v) in [("s0", ic.s0), ("e0", ic.e0), ("i0", ic.i0), ("r0", ic.r0)] {
        report.real(format!("input.initial.{k}"), v);
    }
    report.real("input.run.horizon", cfg.horizon);
    report.real("input.run.step", cfg.step);
    if command == Command::Simulate {
        report.text("input.run.method", cfg.method.to_string());
        if cfg.method == Method::Cascade {
            report.count("input.run.quad_n", cfg.quad_n as u64);
        }
    }
    if command.uses_ensemble() {
        let e = &cfg.ensemble;
        report.count("input.ensemble.seed", e.seed);
        match command {
            Command::SimulateSde => report.count("input.ensemble.replica", e.replica),
            _ => report.count("input.ensemble.n_rep", e.n_rep as u64),
        }
        if command == Command::Concentration {
            for (k, rho) in e.rho.iter().enumerate() {
                report.real(format!("input.ensemble.rho.{k}"), *rho);
            }
            report.real("input.ensemble.epsilon2", e.epsilon2.unwrap_or(2.0 * p.epsilon));
        }
    }
}

fn equilibria_report(report: &mut Report, p: &Params64) {
    let set = equilibria(p);
    report.real("output.r0", set.r0);
    report.state("output.x_free", &set.x_free);
    report.real("output.x_free.residual", equilibrium_residual(p, &set.x_free));
    report.flag("output.x_star.present", set.x_star.is_some());
    if let Some(x) = set.x_star {
        report.state("output.x_star", &x);
        report.real("output.x_star.residual", equilibrium_residual(p, &x));
    }
}

fn trajectory_summary(report: &mut Report, p: &Params64, tr: &Trajectory64) {
    report.count("output.nodes", tr.len() as u64);
    report.real("output.final.t", tr.final_time());
    let last = tr.final_state();
    report.state("output.final", &last);
    report.real("output.max_sum_drift", tr.max_sum_drift());
    report.real("output.min_component", tr.min_component());
    report.real("output.distance_to_x_free", last.distance(&State::disease_free()));
    if let Some(x) = coexistence_equilibrium(p) {
        report.real("output.distance_to_x_star", last.distance(&x));
    }
}

fn simulate(report: &mut Report, cfg: &RunConfig) -> Result<Trajectory64, CliError> {
    let p = &cfg.params;
    let (name, tr) = match cfg.method {
        Method::Auto if p.r == 0.0 => (
            "rk4",
            integrate_ode(p, &cfg.initial.state_at_zero(), cfg.horizon, cfg.step)?,
        ),
        Method::Auto => ("abm4", integrate_dde(p, &cfg.initial, cfg.horizon, cfg.step)?),
        Method::Euler => ("euler", integrate_euler(p, &cfg.initial, cfg.horizon, cfg.step)?),
        Method::Cascade => (
            "cascade",
            integrate_dde_cascade(p, &cfg.initial, cfg.horizon, cfg.quad_n)?,
        ),
    };
    report.text("output.integrator", name);
    trajectory_summary(report, p, &tr);
    Ok(tr)
}

fn simulate_sde_cmd(report: &mut Report, cfg: &RunConfig) -> Result<Trajectory64, CliError> {
    let seed = Seed::new(cfg.ensemble.seed);
    let tr = simulate_sde(
        &cfg.params,
        &cfg.initial,
        cfg.horizon,
        cfg.step,
        &seed,
        cfg.ensemble.replica,
    )?;
    report.text("output.integrator", "euler-maruyama");
    trajectory_summary(report, &cfg.params, &tr);
    Ok(tr)
}

fn eigenvalues(report: &mut Report, prefix: &str, spectrum: &[num_complex::Complex<f64>]) {
    for (k, z) in spectrum.iter().enumerate() {
        report.real(format!("{prefix}.eigenvalue.{k}.re"), z.re);
        report.real(format!("{prefix}.eigenvalue.{k}.im"), z.im);
    }
    report.text(
        format!("{prefix}.spectral_status"),
        spectral_stability(spectrum).to_string(),
    );
}

fn matrix_invariants(report: &mut Report, prefix: &str, m: &Matrix3<f64>) {
    report.real(format!("{prefix}.trace"), m.trace());
    report.real(format!("{prefix}.minor_sum"), m.principal_minor_sum());
    report.real(format!("{prefix}.determinant"), m.determinant());
}

fn stability(report: &mut Report, p: &Params64) -> Result<(), CliError> {
    report.real("output.r0", basic_reproduction_number(p));
    let jf = jacobian_free_disease(p);
    let closed = free_disease_eigenvalues_closed_form(p);
    for (k, v) in closed.iter().enumerate() {
        report.real(format!("output.free.closed_form.{k}"), *v);
    }
    matrix_invariants(report, "output.free", &jf);
    eigenvalues(report, "output.free", &jf.eigenvalues());
    report.verdict("output.free.routh_hurwitz", &routh_hurwitz_free_disease(p));
    report.flag("output.coexistence.present", p.beta > p.mu);
    if p.beta > p.mu {
        let a = jacobian_coexistence(p)?;
        matrix_invariants(report, "output.coexistence", &a);
        eigenvalues(report, "output.coexistence", &a.eigenvalues());
        report.verdict("output.coexistence.routh_hurwitz", &routh_hurwitz_coexistence(p)?);
    }
    Ok(())
}

fn coefficients(report: &mut Report, q: &QuasiPolynomial64) {
    for (k, v) in q.a().iter().enumerate() {
        report.real(format!("output.a.{k}"), *v);
    }
    for (k, v) in q.b().iter().enumerate() {
        report.real(format!("output.b.{k}"), *v);
    }
}

fn crossing(report: &mut Report, c: &CrossingReport64) {
    report.real("output.omega", c.omega);
    report.real("output.theta", c.theta);
    report.real("output.r_star", c.r_star);
    report.real("output.cos_theta", c.cos_theta);
    report.real("output.sin_theta", c.sin_theta);
    report.real("output.residual", c.residual);
}

fn delay_margin(report: &mut Report, p: &Params64) -> Result<(), CliError> {
    let admissible = p.k_r / E;
    if p.beta < p.mu {
        report.text("output.equilibrium", "free-disease");
        let q = char_poly_delay_free(p);
        coefficients(report, &q);
        let c = deg2_crossing(&q)?;
        crossing(report, &c);
        let margin = free_disease_margin(p)?;
        let half_pi_k = FRAC_PI_2 * p.k_r;
        report.real("output.margin", margin);
        report.real("output.half_pi_k_r", half_pi_k);
        report.real("output.max_admissible_delay", admissible);
        let chain = p.r < half_pi_k && half_pi_k <= margin && margin <= c.r_star;
        report.flag("output.chain_holds", chain);
        let verdict = if chain && admissible < c.r_star {
            VERDICT_ALL_ADMISSIBLE.to_string()
        } else {
            format!("stable for r < {}", crate::report::format_real(c.r_star))
        };
        report.text("output.verdict", verdict);
    } else if p.beta > p.mu {
        report.text("output.equilibrium", "coexistence");
        let q = char_poly_delay_coexistence(p)?;
        coefficients(report, &q);
        let d = deg3_crossing(&q)?;
        report.real("output.cubic.a", d.abc.a);
        report.real("output.cubic.b", d.abc.b);
        report.real("output.cubic.c", d.abc.c);
        report.real("output.delta", d.delta);
        report.real("output.delta_standard", d.delta_standard);
        report.flag("output.discriminant_agrees", d.discriminant_agrees);
        for (k, x) in d.omega_sq_roots.iter().enumerate() {
            report.real(format!("output.omega_sq_root.{k}"), *x);
        }
        report.real("output.max_admissible_delay", admissible);
        let verdict = match &d.report {
            Some(c) => {
                crossing(report, c);
                if admissible < c.r_star {
                    VERDICT_ALL_ADMISSIBLE.to_string()
                } else {
                    format!("stable for r < {}", crate::report::format_real(c.r_star))
                }
            }
            None => {
                report.warn("delta >= 0: the discriminant test does not decide this case");
                "inconclusive".to_string()
            }
        };
        report.text("output.verdict", verdict);
    } else {
        return Err(CliError::Numerical(
            "beta = mu: lambda = 0 is a characteristic root for every delay".into(),
        ));
    }
    Ok(())
}

fn concentration(report: &mut Report, cfg: &RunConfig) -> Result<(), CliError> {
    let e = &cfg.ensemble;
    if e.rho.is_empty() {
        return Err(CliError::Validation(
            "concentration needs a nonempty ensemble.rho grid".into(),
        ));
    }
    let c = concentration_check(
        &cfg.params,
        &cfg.initial,
        cfg.horizon,
        cfg.step,
        e.n_rep,
        &e.rho,
        &Seed::new(e.seed),
        e.epsilon2,
    )?;
    let s = &c.summary;
    report.flag("output.degenerate", c.degenerate);
    report.real("output.median_sup_deviation", s.median_sup_deviation());
    report.real("output.q95_sup_deviation", s.sup_deviation_quantile(0.95));
    report.state("output.mean_final", &s.mean_final);
    for (k, t) in s.tail.iter().enumerate() {
        report.real(format!("output.tail.{k}.rho"), t.rho);
        report.count(format!("output.tail.{k}.exceedances"), t.exceedances as u64);
        report.real(format!("output.tail.{k}.probability"), t.probability);
    }
    if let Some(fit) = &c.fit {
        report.real("output.c_hat", fit.c_hat);
        report.count("output.fit_points", fit.points.len() as u64);
    }
    report.flag("output.log_tail_decreasing", c.log_tail_decreasing);
    if let Some(t) = &c.transfer {
        report.real("output.transfer.epsilon", t.epsilon);
        report.real("output.transfer.safety", t.safety);
        report.real("output.transfer.median_sup_deviation", t.summary.median_sup_deviation());
        for (k, (rho, emp, bound)) in t.bounds.iter().enumerate() {
            report.real(format!("output.transfer.{k}.rho"), *rho);
            report.real(format!("output.transfer.{k}.probability"), *emp);
            report.real(format!("output.transfer.{k}.bound"), *bound);
        }
        report.flag("output.transfer.holds", t.holds);
        if !t.holds {
            report.warn("fitted tail does not dominate the empirical tail at the second noise level");
        }
    }
    Ok(())
}

fn lyapunov(report: &mut Report, cfg: &RunConfig) -> Result<(), CliError> {
    let p = &cfg.params;
    let holds = lyapunov_condition(p)?;
    report.real("output.margin", lyapunov_margin(p));
    report.real("output.threshold", lyapunov_threshold(p));
    if let Some(eps) = critical_epsilon(p) {
        report.real("output.critical_epsilon", eps);
    }
    report.flag("output.condition", holds);
    if holds {
        let c = lyapunov_certificate(p)?;
        report.real("output.certificate.v2", c.v2);
        report.real("output.certificate.v3", c.v3);
        report.real("output.certificate.lambda1_sq", c.lambda1_sq);
        report.real("output.certificate.lambda3_sq", c.lambda3_sq);
        report.real("output.certificate.alpha0", c.alpha0);
        for (k, v) in c.inequalities.iter().enumerate() {
            report.real(format!("output.certificate.inequality.{k}"), *v);
        }
        report.real("output.certificate.lv_bound", c.lv_bound);
        report.flag("output.certificate.holds", c.holds);
    }
    let exp = stochastic_stability_experiment(
        p,
        &cfg.initial,
        cfg.horizon,
        cfg.step,
        cfg.ensemble.n_rep,
        &Seed::new(cfg.ensemble.seed),
    )?;
    report.real("output.experiment.mean_infected", exp.mean_infected);
    report.real("output.experiment.p95_infected", exp.p95_infected);
    for w in exp.warnings {
        report.warn(w);
    }
    Ok(())
}

/// CSV with header `t,S,E,I,R`; values use the shortest representation that
/// parses back to the same `f64`.
pub fn write_trajectory(out: &mut impl Write, tr: &Trajectory64) -> std::io::Result<()> {
    writeln!(out, "t,S,E,I,R")?;
    for (t, x) in tr.times.iter().zip(&tr.states) {
        let [s, e, i, r] = x.to_array();
        writeln!(out, "{t},{s},{e},{i},{r}")?;
    }
    Ok(())
}
