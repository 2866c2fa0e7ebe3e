//! `crspace`: construct and verify Crouzeix-Raviart spaces from the command
//! line.
//!
//! Exit codes: 0 success / all checks pass; 1 verification failure;
//! 2 usage or input error; 3 structurally valid but unsupported request
//! (even-order dofs, single-simplex boundary dofs, edge machinery outside
//! d = 2, unknown generator for the dimension).

use clap::{Args, Parser, Subcommand};
use crspace_cli::format::{parse_mesh, render_mesh};
use crspace_cli::polyparse::{global_poly_to_fe, parse_poly};
use crspace_cli::quad::{callable_coefficients, demo_function, demo_order};
use crspace_cli::tables::{basis_table, coefficient_table, csv_line, dof_table, OutFormat};
use crspace_core::basis::{build_basis, Bc};
use crspace_core::complex::SimplicialComplex;
use crspace_core::dofs::{approx_op_2d, assemble_dofs, interpolate, make_mark, MarkPolicy};
use crspace_core::mesh::Generator;
use crspace_core::num::multi_indices;
use crspace_core::verify::{run_suite, CheckStatus, Report, SuiteConfig};
use crspace_core::Error as CoreError;
use num_traits::ToPrimitive;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "crspace", version, about = "Crouzeix-Raviart spaces of arbitrary order: exact construction and verification")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct MeshArgs {
    /// Mesh file in the text format.
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Built-in generator: reference | two-simplex | kuhn-cube | grid2d.
    #[arg(long)]
    gen: Option<String>,
    /// Dimension for generators that take one.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Grid resolution for grid2d.
    #[arg(long, default_value_t = 2)]
    n: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a mesh file from a built-in generator.
    Mesh {
        /// Generator name: reference | two-simplex | kuhn-cube | grid2d.
        #[arg(long)]
        gen: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the assembled basis.
    Basis {
        #[command(flatten)]
        mesh: MeshArgs,
        /// Polynomial order k >= 1.
        #[arg(short = 'k', long = "order")]
        order: usize,
        /// Boundary conditions: full | zero.
        #[arg(long, default_value = "full")]
        bc: String,
        #[arg(long, default_value = "plain")]
        format: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the bidual degrees of freedom (odd orders).
    Dofs {
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(short = 'k', long = "order")]
        order: usize,
        #[arg(long, default_value = "full")]
        bc: String,
        #[arg(long, default_value = "plain")]
        format: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run the verification suite and emit a structured report.
    Verify {
        #[command(flatten)]
        mesh: MeshArgs,
        /// Orders to verify: "3", "1..4" (inclusive) or "1,3,5".
        #[arg(long = "k-range", default_value = "1..3")]
        k_range: String,
        /// Only run checks whose name starts with this prefix. Filters
        /// containing "negcontrol" also select the negative controls.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Interpolate a function into the space and list its coefficients.
    Interpolate {
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(short = 'k', long = "order")]
        order: usize,
        #[arg(long, default_value = "full")]
        bc: String,
        /// Input: "poly:EXPR" (exact, variables x0..x{d-1}),
        /// "member:IDX" (exact basis member), or a named demo function
        /// (sinprod | expsum | radial; binary64 quadrature path).
        #[arg(long)]
        input: String,
        /// general (volume/facet dofs) | edges (2-D edge operator).
        #[arg(long, default_value = "general")]
        method: String,
        /// Quadrature order for the demo path (default from k and d).
        #[arg(long)]
        quad_order: Option<usize>,
        /// Per-simplex sampling resolution for the value table (0 = off).
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value = "plain")]
        format: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

/// Failure that carries its process exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure {
            code: 2,
            msg: msg.into(),
        }
    }
    fn unsupported(msg: impl Into<String>) -> Self {
        Failure {
            code: 3,
            msg: msg.into(),
        }
    }
}

fn core_err(e: CoreError) -> Failure {
    match e {
        CoreError::UnsupportedGenerator(_)
        | CoreError::EvenOrderDofs { .. }
        | CoreError::EvenOrder { .. }
        | CoreError::SingleSimplexMesh
        | CoreError::NotTwoDimensional { .. }
        | CoreError::BadFaceDimension { .. } => Failure::unsupported(e.to_string()),
        other => Failure::usage(other.to_string()),
    }
}

fn load_complex(args: &MeshArgs) -> Result<(String, SimplicialComplex), Failure> {
    match (&args.mesh, &args.gen) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
            let mesh = parse_mesh(&text).map_err(|e| Failure::usage(e.to_string()))?;
            let name = path
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "mesh".into());
            Ok((name, SimplicialComplex::build(mesh)))
        }
        (None, Some(gen)) => {
            let g = Generator::parse(gen, args.dim, args.n).map_err(core_err)?;
            let mesh = g.build().map_err(core_err)?;
            Ok((g.describe(), SimplicialComplex::build(mesh)))
        }
        _ => Err(Failure::usage(
            "exactly one of --mesh FILE or --gen NAME is required",
        )),
    }
}

fn parse_bc(s: &str) -> Result<Bc, Failure> {
    match s {
        "full" => Ok(Bc::Full),
        "zero" => Ok(Bc::Zero),
        other => Err(Failure::usage(format!("bad --bc '{other}' (full|zero)"))),
    }
}

fn parse_format(s: &str) -> Result<OutFormat, Failure> {
    s.parse().map_err(Failure::usage)
}

fn parse_k_range(s: &str) -> Result<Vec<usize>, Failure> {
    let parse_one = |t: &str| -> Result<usize, Failure> {
        let k: usize = t
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("bad order '{t}'")))?;
        if k == 0 {
            return Err(Failure::usage("order k must be >= 1"));
        }
        Ok(k)
    };
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (parse_one(a)?, parse_one(b)?);
        if a > b {
            return Err(Failure::usage(format!("empty k range '{s}'")));
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(parse_one).collect()
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn render_report(report: &Report, format: OutFormat) -> String {
    match format {
        OutFormat::Json => {
            serde_json::to_string_pretty(report).expect("serializable") + "\n"
        }
        OutFormat::Csv => {
            let mut out = String::from("name,mesh,d,k,bc,status,witness\n");
            for c in &report.checks {
                let status = match c.status {
                    CheckStatus::Pass => "pass",
                    CheckStatus::Fail => "fail",
                    CheckStatus::Skipped => "skipped",
                };
                let _ = writeln!(
                    out,
                    "{}",
                    csv_line(&[
                        c.name.clone(),
                        c.params.mesh.clone().unwrap_or_default(),
                        c.params.d.map(|v| v.to_string()).unwrap_or_default(),
                        c.params.k.map(|v| v.to_string()).unwrap_or_default(),
                        c.params.bc.clone().unwrap_or_default(),
                        status.to_string(),
                        c.witness.clone().unwrap_or_default(),
                    ])
                );
            }
            out
        }
        OutFormat::Plain => {
            let mut out = String::new();
            for c in &report.checks {
                let status = match c.status {
                    CheckStatus::Pass => "PASS",
                    CheckStatus::Fail => "FAIL",
                    CheckStatus::Skipped => "SKIP",
                };
                let mut ctx = Vec::new();
                if let Some(m) = &c.params.mesh {
                    ctx.push(m.clone());
                }
                if let Some(d) = c.params.d {
                    ctx.push(format!("d={d}"));
                }
                if let Some(k) = c.params.k {
                    ctx.push(format!("k={k}"));
                }
                if let Some(bc) = &c.params.bc {
                    ctx.push(format!("bc={bc}"));
                }
                let _ = write!(out, "{status} {}", c.name);
                if !ctx.is_empty() {
                    let _ = write!(out, " [{}]", ctx.join(" "));
                }
                if let Some(w) = &c.witness {
                    let _ = write!(out, " -- {w}");
                }
                let _ = writeln!(out);
            }
            let (pass, fail, skipped) = report.counts();
            let _ = writeln!(
                out,
                "{pass} passed, {fail} failed, {skipped} skipped ({} ms)",
                report.elapsed_ms
            );
            out
        }
    }
}

fn cmd_verify(
    mesh: &MeshArgs,
    k_range: &str,
    filter: Option<String>,
    format: &str,
    out: &Option<PathBuf>,
) -> Result<u8, Failure> {
    let format = parse_format(format)?;
    let k_values = parse_k_range(k_range)?;
    let cfg = SuiteConfig { k_values, filter };
    let start = Instant::now();
    let mut report = if mesh.mesh.is_none() && mesh.gen.is_none() {
        // built-in battery
        let battery = [
            Generator::TwoSimplex { d: 2 },
            Generator::Grid2d { n: 2 },
            Generator::TwoSimplex { d: 3 },
            Generator::KuhnCube { d: 3 },
        ];
        let complexes: Vec<(String, SimplicialComplex)> = battery
            .iter()
            .map(|g| {
                let m = g.build().map_err(core_err)?;
                Ok((g.describe(), SimplicialComplex::build(m)))
            })
            .collect::<Result<_, Failure>>()?;
        let refs: Vec<(String, &SimplicialComplex)> = complexes
            .iter()
            .map(|(n, c)| (n.clone(), c))
            .collect();
        run_suite(&refs, &cfg)
    } else {
        let (name, cx) = load_complex(mesh)?;
        run_suite(&[(name, &cx)], &cfg)
    };
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    let rendered = render_report(&report, format);
    write_output(out, &rendered)?;
    Ok(if report.all_passed() { 0 } else { 1 })
}

#[allow(clippy::too_many_arguments)]
fn cmd_interpolate(
    mesh: &MeshArgs,
    order: usize,
    bc: &str,
    input: &str,
    method: &str,
    quad_order: Option<usize>,
    samples: usize,
    format: &str,
    out: &Option<PathBuf>,
) -> Result<u8, Failure> {
    let format = parse_format(format)?;
    let bc = parse_bc(bc)?;
    if order == 0 {
        return Err(Failure::usage("order k must be >= 1"));
    }
    let (mesh_name, cx) = load_complex(mesh)?;
    let d = cx.dim();
    let basis = build_basis(&cx, order, bc).map_err(core_err)?;
    let tags: Vec<String> = basis.tags().map(|t| t.render()).collect();
    let mut meta: Vec<(String, String)> = vec![
        ("mesh".into(), mesh_name),
        ("order".into(), order.to_string()),
        ("bc".into(), bc.as_str().into()),
        ("method".into(), method.to_string()),
        ("input".into(), input.to_string()),
    ];

    // classify the input
    enum Input {
        Exact(crspace_core::fe::FeFunction, Option<crspace_core::poly::MultiPoly>),
        Callable(Box<dyn Fn(&[f64]) -> f64>),
    }
    let parsed = if let Some(idx) = input.strip_prefix("member:") {
        let idx: usize = idx
            .parse()
            .map_err(|_| Failure::usage(format!("bad member index '{idx}'")))?;
        if idx >= basis.len() {
            return Err(Failure::usage(format!(
                "member index {idx} out of range (basis has {} members)",
                basis.len()
            )));
        }
        Input::Exact(basis.entries[idx].1.clone(), None)
    } else if let Some(expr) = input.strip_prefix("poly:") {
        let p = parse_poly(expr, d).map_err(|e| Failure::usage(e.to_string()))?;
        Input::Exact(global_poly_to_fe(&cx, &p), Some(p))
    } else if let Some(f) = demo_function(input, d) {
        Input::Callable(f)
    } else {
        // bare expressions are treated as polynomials
        let p = parse_poly(input, d).map_err(|e| {
            Failure::usage(format!(
                "input '{input}' is neither a demo function (sinprod|expsum|radial) nor a polynomial: {e}"
            ))
        })?;
        Input::Exact(global_poly_to_fe(&cx, &p), Some(p))
    };

    let mark = make_mark(&cx, MarkPolicy::SmallestId);
    let content = match parsed {
        Input::Exact(u, global) => {
            let result = match method {
                "general" => {
                    let dofs = assemble_dofs(&cx, &basis, &mark).map_err(core_err)?;
                    let (coeffs, result) = interpolate(&cx, &basis, &dofs, &u);
                    meta.push((
                        "residual_zero".into(),
                        result.fe_eq(&u).to_string(),
                    ));
                    (coeffs, result)
                }
                "edges" => {
                    let approx = approx_op_2d(&cx, order, &u, bc).map_err(core_err)?;
                    // re-expand the output through the general dofs so the
                    // coefficient listing is aligned with the basis
                    let dofs = assemble_dofs(&cx, &basis, &mark).map_err(core_err)?;
                    let (coeffs, _) = interpolate(&cx, &basis, &dofs, &approx);
                    meta.push((
                        "residual_zero".into(),
                        approx.fe_eq(&u).to_string(),
                    ));
                    (coeffs, approx)
                }
                other => {
                    return Err(Failure::usage(format!(
                        "bad --method '{other}' (general|edges)"
                    )))
                }
            };
            let (coeffs, interpolant) = result;
            let mut content = String::new();
            if samples > 0 {
                let (table, max_err) =
                    sample_table(&cx, &interpolant, samples, |x| {
                        global.as_ref().map(|p| p.eval_f64(x))
                    });
                if let Some(e) = max_err {
                    meta.push(("sampled_max_error".into(), format!("{e:e}")));
                }
                meta.push(("samples_per_axis".into(), samples.to_string()));
                content.push_str(&coefficient_table(&tags, Some(&coeffs), None, &meta, format));
                content.push_str(&table);
            } else {
                content.push_str(&coefficient_table(&tags, Some(&coeffs), None, &meta, format));
            }
            content
        }
        Input::Callable(f) => {
            if method != "general" {
                return Err(Failure::unsupported(
                    "demo functions interpolate through the general method only",
                ));
            }
            let dofs = assemble_dofs(&cx, &basis, &mark).map_err(core_err)?;
            let q = quad_order.unwrap_or_else(|| demo_order(order, d));
            meta.push(("quad_order".into(), q.to_string()));
            let coeffs = callable_coefficients(&cx, &dofs, f.as_ref(), q);
            // sample the float interpolant against the input
            let n = samples.max(order + 1);
            let mut max_err = 0.0f64;
            let mut rows: Vec<(Vec<f64>, f64, f64)> = Vec::new();
            for kk in 0..cx.mesh().num_simplices() {
                for mu in multi_indices(d, n) {
                    let rest: usize = mu.iter().sum();
                    let mut lam = vec![(n - rest) as f64 / n as f64];
                    lam.extend(mu.iter().map(|&m| m as f64 / n as f64));
                    let s = cx.mesh().simplex(kk);
                    let mut p = vec![0.0; d];
                    for (pos, &z) in s.iter().enumerate() {
                        let v = cx.mesh().vertex(z);
                        for (i, pi) in p.iter_mut().enumerate() {
                            *pi += lam[pos] * v[i].to_f64().unwrap();
                        }
                    }
                    let got: f64 = basis
                        .entries
                        .iter()
                        .zip(&coeffs)
                        .map(|((_, b), c)| c * b.part(kk).eval_f64(&lam))
                        .sum();
                    let want = f(&p);
                    max_err = max_err.max((got - want).abs());
                    if samples > 0 {
                        rows.push((p, got, want));
                    }
                }
            }
            meta.push(("sampled_max_error".into(), format!("{max_err:e}")));
            let mut content =
                coefficient_table(&tags, None, Some(&coeffs), &meta, format);
            if samples > 0 {
                content.push_str(&render_sample_rows(&rows, format));
            }
            content
        }
    };
    write_output(out, &content)?;
    Ok(0)
}

/// Samples the exact interpolant on per-simplex barycentric lattices;
/// returns the rendered table and the max error against `reference`.
fn sample_table(
    cx: &SimplicialComplex,
    interpolant: &crspace_core::fe::FeFunction,
    n: usize,
    reference: impl Fn(&[f64]) -> Option<f64>,
) -> (String, Option<f64>) {
    let d = cx.dim();
    let mut rows: Vec<(Vec<f64>, f64, f64)> = Vec::new();
    let mut max_err: Option<f64> = None;
    for kk in 0..cx.mesh().num_simplices() {
        for mu in multi_indices(d, n) {
            let rest: usize = mu.iter().sum();
            let mut lam_f = vec![(n - rest) as f64 / n as f64];
            lam_f.extend(mu.iter().map(|&m| m as f64 / n as f64));
            let s = cx.mesh().simplex(kk);
            let mut p = vec![0.0; d];
            for (pos, &z) in s.iter().enumerate() {
                let v = cx.mesh().vertex(z);
                for (i, pi) in p.iter_mut().enumerate() {
                    *pi += lam_f[pos] * v[i].to_f64().unwrap();
                }
            }
            let got = interpolant.part(kk).eval_f64(&lam_f);
            if let Some(want) = reference(&p) {
                let err = (got - want).abs();
                max_err = Some(max_err.map_or(err, |m: f64| m.max(err)));
                rows.push((p, got, want));
            } else {
                rows.push((p, got, f64::NAN));
            }
        }
    }
    (render_sample_rows(&rows, OutFormat::Plain), max_err)
}

fn render_sample_rows(rows: &[(Vec<f64>, f64, f64)], format: OutFormat) -> String {
    let mut out = String::new();
    match format {
        OutFormat::Csv => {
            let _ = writeln!(out, "point,interpolant,input");
            for (p, got, want) in rows {
                let pt = p
                    .iter()
                    .map(|c| format!("{c:.6}"))
                    .collect::<Vec<_>>()
                    .join(" ");
                let _ = writeln!(
                    out,
                    "{}",
                    csv_line(&[pt, format!("{got:.12}"), format!("{want:.12}")])
                );
            }
        }
        _ => {
            let _ = writeln!(out, "sampled values (point : interpolant : input):");
            for (p, got, want) in rows {
                let pt = p
                    .iter()
                    .map(|c| format!("{c:.4}"))
                    .collect::<Vec<_>>()
                    .join(" ");
                let _ = writeln!(out, "  ({pt}) : {got:.12} : {want:.12}");
            }
        }
    }
    out
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match &cli.cmd {
        Cmd::Mesh { gen, dim, n, out } => {
            let g = Generator::parse(gen, *dim, *n).map_err(core_err)?;
            let mesh = g.build().map_err(core_err)?;
            write_output(out, &render_mesh(&mesh))?;
            Ok(0)
        }
        Cmd::Basis {
            mesh,
            order,
            bc,
            format,
            out,
        } => {
            let format = parse_format(format)?;
            let bc = parse_bc(bc)?;
            if *order == 0 {
                return Err(Failure::usage("order k must be >= 1"));
            }
            let (_, cx) = load_complex(mesh)?;
            let basis = build_basis(&cx, *order, bc).map_err(core_err)?;
            write_output(out, &basis_table(&cx, &basis, format))?;
            Ok(0)
        }
        Cmd::Dofs {
            mesh,
            order,
            bc,
            format,
            out,
        } => {
            let format = parse_format(format)?;
            let bc = parse_bc(bc)?;
            if *order == 0 {
                return Err(Failure::usage("order k must be >= 1"));
            }
            let (_, cx) = load_complex(mesh)?;
            let basis = build_basis(&cx, *order, bc).map_err(core_err)?;
            let mark = make_mark(&cx, MarkPolicy::SmallestId);
            let dofs = assemble_dofs(&cx, &basis, &mark).map_err(core_err)?;
            write_output(out, &dof_table(&cx, &dofs, format))?;
            Ok(0)
        }
        Cmd::Verify {
            mesh,
            k_range,
            filter,
            format,
            out,
        } => cmd_verify(mesh, k_range, filter.clone(), format, out),
        Cmd::Interpolate {
            mesh,
            order,
            bc,
            input,
            method,
            quad_order,
            samples,
            format,
            out,
        } => cmd_interpolate(
            mesh,
            *order,
            bc,
            input,
            method,
            *quad_order,
            *samples,
            format,
            out,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
