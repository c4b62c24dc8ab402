//! Batch front end for the stiffness identification library: validates
//! and identifies measurement campaigns, assembles block stiffnesses,
//! locates the stiffness center, sizes the holding fixture and
//! generates synthetic campaigns.
//!
//! Exit codes: 0 success, 1 validation error, 2 numerical failure,
//! 3 I/O failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use stiffid::center::{self, center_direction_angle, parse_center_file};
use stiffid::error::ErrorCategory;
use stiffid::ingest::{self, readings_to_twist, Campaign};
use stiffid::plot::{self, Projection};
use stiffid::report::{
    self, AssemblyReport, CenterReport, KfReport, Meta, PlaneAngle, SizingReport, StiffnessReport,
};
use stiffid::sizing::{deflection, sweep_lengths, BeamSpec};
use stiffid::solver::{
    assemble_parallel, identify, principal_angle_in_plane, principal_decomposition,
    IdentifyOutput, Plane, PrincipalDecomposition,
};
use stiffid::synth::{campaign_to_json, parse_synth_spec_str, simulate_campaign};
use stiffid::torsor::{Mat3, Vec3};
use stiffid::Error;

#[derive(Parser)]
#[command(name = "stiffid", version, about = "Static stiffness identification for turning machine systems")]
struct Cli {
    /// Directory reports and plots are written to
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Also write SVG plots
    #[arg(long, global = true)]
    plots: bool,
    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Check a campaign file against the schema and geometry invariants
    Validate {
        campaign: PathBuf,
        /// Raw logger dump supplying the steps (case,phase,force_daN,m1..m6)
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Identify compliance and stiffness matrices from a campaign
    Identify {
        campaign: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Plane(s) for the principal deformation angle (xy, yz, xz)
        #[arg(long = "plane", value_delimiter = ',')]
        planes: Vec<String>,
    },
    /// Add two displacement stiffness blocks in parallel and analyze
    Assemble {
        /// Tool-block input: identification report or 3x3 matrix JSON
        bt: PathBuf,
        /// Workpiece-block input: identification report or 3x3 matrix JSON
        bw: PathBuf,
        #[arg(long = "plane", value_delimiter = ',', default_value = "xy")]
        planes: Vec<String>,
    },
    /// Locate the stiffness center from per-axis displacement lines
    Center {
        measurements: PathBuf,
        /// Eigenvector for the direction-angle report, overriding the file ("x,y,z")
        #[arg(long)]
        v3: Option<String>,
    },
    /// Cantilever sizing of the holding fixture / workpiece
    SizeFixture {
        #[arg(long = "force-n")]
        force_n: f64,
        #[arg(long = "young-nmm2")]
        young_nmm2: f64,
        #[arg(long = "diameter-mm")]
        diameter_mm: f64,
        #[arg(long = "length-mm")]
        length_mm: f64,
        /// Length sweep as lo:hi:step (mm)
        #[arg(long)]
        sweep: Option<String>,
    },
    /// Generate a synthetic campaign from a ground-truth stiffness
    Synth {
        spec: PathBuf,
        /// Output campaign path (default: <out>/synthetic_campaign.json)
        #[arg(long = "out-file")]
        out_file: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e.category() {
                ErrorCategory::Validation => ExitCode::from(1),
                ErrorCategory::Numerical => ExitCode::from(2),
                ErrorCategory::Io => ExitCode::from(3),
            }
        }
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    std::fs::create_dir_all(&cli.out)?;
    match &cli.command {
        Command::Validate { campaign, csv } => cmd_validate(campaign, csv.as_deref()),
        Command::Identify { campaign, csv, planes } => {
            cmd_identify(cli, campaign, csv.as_deref(), planes)
        }
        Command::Assemble { bt, bw, planes } => cmd_assemble(cli, bt, bw, planes),
        Command::Center { measurements, v3 } => cmd_center(cli, measurements, v3.as_deref()),
        Command::SizeFixture { force_n, young_nmm2, diameter_mm, length_mm, sweep } => {
            cmd_size_fixture(cli, *force_n, *young_nmm2, *diameter_mm, *length_mm, sweep.as_deref())
        }
        Command::Synth { spec, out_file } => cmd_synth(cli, spec, out_file.as_deref()),
    }
}

fn load_campaign(path: &Path, csv: Option<&Path>) -> Result<(Campaign, Vec<Vec<u8>>), Error> {
    let mut inputs = vec![std::fs::read(path)?];
    let campaign = match csv {
        None => ingest::parse_campaign(path)?,
        Some(csv_path) => {
            inputs.push(std::fs::read(csv_path)?);
            ingest::parse_campaign_with_csv(path, csv_path)?
        }
    };
    Ok((campaign, inputs))
}

fn meta_from(inputs: &[Vec<u8>]) -> Meta {
    let slices: Vec<&[u8]> = inputs.iter().map(|v| v.as_slice()).collect();
    Meta::new(&slices)
}

fn parse_plane(name: &str) -> Result<Plane, Error> {
    match name.to_ascii_lowercase().as_str() {
        "xy" => Ok(Plane::XY),
        "yz" => Ok(Plane::YZ),
        "xz" => Ok(Plane::XZ),
        other => Err(Error::Ingest(ingest::IngestError::Schema(format!(
            "unknown plane {other:?} (expected xy, yz or xz)"
        )))),
    }
}

fn plane_angles(
    pd: &PrincipalDecomposition,
    planes: &[String],
    warnings: &mut Vec<String>,
) -> Result<Vec<PlaneAngle>, Error> {
    let mut out = Vec::new();
    for name in planes {
        let plane = parse_plane(name)?;
        match principal_angle_in_plane(pd, &plane) {
            Ok(angle_deg) => out.push(PlaneAngle { plane: name.clone(), angle_deg }),
            Err(e) => warnings.push(format!("plane {name}: {e}")),
        }
    }
    Ok(out)
}

fn write_out(cli: &Cli, name: &str, content: &str) -> Result<PathBuf, Error> {
    let path = cli.out.join(name);
    std::fs::write(&path, content)?;
    Ok(path)
}

fn cmd_validate(path: &Path, csv: Option<&Path>) -> Result<(), Error> {
    let (campaign, _) = load_campaign(path, csv)?;
    let steps: usize = campaign.cases.iter().map(|c| c.steps.len()).sum();
    println!(
        "OK: {} campaign, {} cases, {} steps, load condition {:.3e}",
        match campaign.block {
            ingest::BlockId::Bt => "BT",
            ingest::BlockId::Bw => "BW",
        },
        campaign.cases.len(),
        steps,
        campaign.load_condition()
    );
    Ok(())
}

fn cmd_identify(
    cli: &Cli,
    path: &Path,
    csv: Option<&Path>,
    planes: &[String],
) -> Result<(), Error> {
    let (campaign, inputs) = load_campaign(path, csv)?;
    let meta = meta_from(&inputs);

    match identify(&campaign)? {
        IdentifyOutput::Full(id) => {
            let mut rep = StiffnessReport::from_identification(&id, meta);
            if let Some(pd) = &rep.principal {
                let mut warnings = rep.warnings.clone();
                rep.principal_angles = plane_angles(pd, planes, &mut warnings)?;
                rep.warnings = warnings;
            }
            let json = report::to_json(&rep);
            let out = write_out(cli, "stiffness_report.json", &json)?;
            if cli.format == Format::Csv {
                write_out(cli, "stiffness.csv", &report::mat6_csv(&rep.stiffness))?;
                write_out(cli, "compliance.csv", &report::mat6_csv(&rep.compliance))?;
                write_out(cli, "error_percent.csv", &report::mat6_csv(&rep.error_percent))?;
            }
            if cli.plots {
                write_fit_plots(cli, &campaign, &id.fits)?;
            }
            print!("{}", report::summarize_stiffness(&rep));
            println!("report: {}", out.display());
        }
        IdentifyOutput::TranslationOnly(id) => {
            let mut rep = KfReport::from_identification(&id, meta);
            if let Some(pd) = &rep.principal {
                let mut warnings = rep.warnings.clone();
                rep.principal_angles = plane_angles(pd, planes, &mut warnings)?;
                rep.warnings = warnings;
            }
            let json = report::to_json(&rep);
            let out = write_out(cli, "stiffness_report.json", &json)?;
            if cli.format == Format::Csv {
                write_out(cli, "kf.csv", &report::mat3_csv(&rep.kf))?;
                write_out(cli, "error_percent.csv", &report::mat3_csv(&rep.error_percent))?;
            }
            if cli.plots {
                write_fit_plots(cli, &campaign, &id.fits)?;
            }
            println!(
                "translation-only identification of {} cases; report: {}",
                campaign.cases.len(),
                out.display()
            );
            for w in &rep.warnings {
                println!("warning: {w}");
            }
        }
    }
    Ok(())
}

/// One SVG per case: the component with the largest full-scale value
/// (the dominant deflection direction of that loading).
fn write_fit_plots(
    cli: &Cli,
    campaign: &Campaign,
    fits: &[stiffid::solver::CaseFits],
) -> Result<(), Error> {
    use stiffid::fitting::Phase;
    for (case, case_fits) in campaign.cases.iter().zip(fits) {
        let dominant = case_fits
            .components
            .iter()
            .enumerate()
            .max_by(|a, b| {
                let fa = stiffid::fitting::full_scale(a.1);
                let fb = stiffid::fitting::full_scale(b.1);
                fa.partial_cmp(&fb).unwrap()
            })
            .map(|(i, _)| i)
            .unwrap_or(0);
        // translation-only reports carry 3 components starting at εx
        let component_offset = if case_fits.components.len() == 3 { 3 } else { 0 };
        let series = |phase: Phase| -> Vec<(f64, f64)> {
            case.steps_in_phase(phase)
                .map(|s| {
                    let t = readings_to_twist(&s.readings, &campaign.sensor_config);
                    (s.force, t.as_vector()[dominant + component_offset])
                })
                .collect()
        };
        let names = ["rho_x", "rho_y", "rho_z", "eps_x", "eps_y", "eps_z"];
        let svg = plot::plot_midline(
            &format!("case {} — {}", case.label, names[dominant + component_offset]),
            &series(Phase::Charge),
            &series(Phase::Discharge),
            &case_fits.components[dominant],
        );
        write_out(cli, &format!("fit_{}.svg", case.label), &svg)?;
    }
    Ok(())
}

/// Accepts a full identification report, a translation-only report or a
/// bare `{"matrix3": [[..]]}` / `[[..]]` file.
fn load_kf(path: &Path) -> Result<(Mat3, Vec<u8>), Error> {
    let bytes = std::fs::read(path)?;
    let value: serde_json::Value = serde_json::from_slice(&bytes)?;
    let matrix_value = if let Some(blocks) = value.get("blocks") {
        blocks.get("kf").cloned()
    } else if let Some(kf) = value.get("kf") {
        Some(kf.clone())
    } else if let Some(m) = value.get("matrix3") {
        Some(m.clone())
    } else if value.is_array() {
        Some(value.clone())
    } else {
        None
    };
    let matrix_value = matrix_value.ok_or_else(|| {
        Error::Ingest(ingest::IngestError::Schema(format!(
            "{}: no displacement block found (expected blocks.kf, kf, matrix3 or a bare 3x3 array)",
            path.display()
        )))
    })?;
    let rows: [[f64; 3]; 3] = serde_json::from_value(matrix_value)
        .map_err(|e| Error::Ingest(ingest::IngestError::Schema(e.to_string())))?;
    Ok((Mat3(rows), bytes))
}

fn cmd_assemble(cli: &Cli, bt: &Path, bw: &Path, planes: &[String]) -> Result<(), Error> {
    let (kf_bt, bytes_bt) = load_kf(bt)?;
    let (kf_bw, bytes_bw) = load_kf(bw)?;
    let assembled = assemble_parallel(&kf_bt, &kf_bw);

    let mut warnings = Vec::new();
    let principal = match principal_decomposition(&assembled, "K_F assembled") {
        Ok(pd) => Some(pd),
        Err(e) => {
            warnings.push(format!("assembled block: {e}"));
            None
        }
    };
    let alpha_k = match &principal {
        Some(pd) => plane_angles(pd, planes, &mut warnings)?,
        None => Vec::new(),
    };
    let block_angles = |kf: &Mat3, tag: &str, warnings: &mut Vec<String>| {
        match principal_decomposition(kf, tag) {
            Ok(pd) => {
                let mut out = Vec::new();
                for name in planes {
                    if let Ok(plane) = parse_plane(name) {
                        if let Ok(angle_deg) = principal_angle_in_plane(&pd, &plane) {
                            out.push(PlaneAngle { plane: name.clone(), angle_deg });
                        }
                    }
                }
                out
            }
            Err(e) => {
                warnings.push(format!("{tag}: {e}"));
                Vec::new()
            }
        }
    };
    let angles_bt = block_angles(&kf_bt, "K_F tool block", &mut warnings);
    let angles_bw = block_angles(&kf_bw, "K_F workpiece block", &mut warnings);

    let rep = AssemblyReport {
        meta: Meta::new(&[&bytes_bt, &bytes_bw]),
        warnings,
        kf_bt,
        kf_bw,
        kf_assembled: assembled,
        principal,
        alpha_k,
        angles_bt,
        angles_bw,
    };
    let out = write_out(cli, "assembly_report.json", &report::to_json(&rep))?;
    if cli.format == Format::Csv {
        write_out(cli, "kf_assembled.csv", &report::mat3_csv(&assembled))?;
    }
    match &rep.principal {
        Some(pd) => println!(
            "assembled principal stiffnesses (N/m): {:.3e}, {:.3e}, {:.3e}",
            pd.eigenvalues[0], pd.eigenvalues[1], pd.eigenvalues[2]
        ),
        None => println!("assembled principal stiffnesses: unavailable (see warnings)"),
    }
    for a in &rep.alpha_k {
        println!("alpha_K in {}: {:.1} deg", a.plane, a.angle_deg);
    }
    for w in &rep.warnings {
        println!("warning: {w}");
    }
    println!("report: {}", out.display());
    Ok(())
}

fn cmd_center(cli: &Cli, path: &Path, v3_flag: Option<&str>) -> Result<(), Error> {
    let bytes = std::fs::read(path)?;
    let input = parse_center_file(path)?;
    let (solution, normals_source) = center::solve_input(&input)?;

    let v3 = match v3_flag {
        Some(text) => Some(parse_vec3(text)?),
        None => input.v3,
    };
    let angle_v3_deg = match v3 {
        Some(v) => Some(center_direction_angle(solution.cr, v, input.origin)?),
        None => None,
    };

    let rep = CenterReport {
        meta: Meta::new(&[&bytes]),
        normals_source: normals_source.into(),
        solution,
        angle_v3_deg,
    };
    let out = write_out(cli, "center_report.json", &report::to_json(&rep))?;
    if cli.plots {
        for projection in [Projection::Xy, Projection::Yz, Projection::Xz] {
            let svg = plot::plot_center(&rep.solution, projection);
            write_out(cli, &format!("center_{}.svg", projection.name()), &svg)?;
        }
    }
    println!(
        "CR = ({:.4}, {:.4}, {:.4}) m, closure residual {:.3e} m ({} normals)",
        rep.solution.cr.x, rep.solution.cr.y, rep.solution.cr.z, rep.solution.residual,
        rep.normals_source
    );
    if let Some(angle) = rep.angle_v3_deg {
        println!("angle between v3 and (CR − O): {angle:.2} deg");
    }
    println!("report: {}", out.display());
    Ok(())
}

fn parse_vec3(text: &str) -> Result<Vec3, Error> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::Ingest(ingest::IngestError::Schema(format!(
            "expected three comma-separated components, got {text:?}"
        ))));
    }
    let mut v = [0.0; 3];
    for (slot, part) in v.iter_mut().zip(&parts) {
        *slot = part.trim().parse::<f64>().map_err(|_| {
            Error::Ingest(ingest::IngestError::Schema(format!("bad component {part:?}")))
        })?;
    }
    Ok(Vec3::from_array(v))
}

fn cmd_size_fixture(
    cli: &Cli,
    force_n: f64,
    young_nmm2: f64,
    diameter_mm: f64,
    length_mm: f64,
    sweep: Option<&str>,
) -> Result<(), Error> {
    let spec = BeamSpec { force_n, length_mm, young_n_mm2: young_nmm2, diameter_mm };
    let result = deflection(&spec)?;
    let sweep_rows = match sweep {
        None => Vec::new(),
        Some(range) => {
            let parts: Vec<&str> = range.split(':').collect();
            if parts.len() != 3 {
                return Err(Error::Ingest(ingest::IngestError::Schema(format!(
                    "--sweep expects lo:hi:step, got {range:?}"
                ))));
            }
            let parse = |s: &str| -> Result<f64, Error> {
                s.parse::<f64>().map_err(|_| {
                    Error::Ingest(ingest::IngestError::Schema(format!("bad sweep bound {s:?}")))
                })
            };
            sweep_lengths(&spec, parse(parts[0])?, parse(parts[1])?, parse(parts[2])?)?
        }
    };

    let rep = SizingReport {
        meta: Meta::new(&[]),
        force_n,
        young_n_mm2: young_nmm2,
        diameter_mm,
        length_mm,
        result,
        sweep: sweep_rows.clone(),
    };
    let out = write_out(cli, "sizing_report.json", &report::to_json(&rep))?;
    if !sweep_rows.is_empty() {
        write_out(cli, "sweep.csv", &report::sweep_csv(&sweep_rows))?;
        if cli.plots {
            write_out(cli, "sweep.svg", &plot::plot_sweep(&sweep_rows))?;
        }
    }
    println!(
        "L = {length_mm} mm: deflection {:.5} mm, flexural stiffness {:.3e} N/m",
        result.deflection_mm, result.stiffness_n_per_m
    );
    println!("report: {}", out.display());
    Ok(())
}

fn cmd_synth(cli: &Cli, spec_path: &Path, out_file: Option<&Path>) -> Result<(), Error> {
    let text = std::fs::read_to_string(spec_path)?;
    let spec = parse_synth_spec_str(&text)?;
    let campaign = simulate_campaign(&spec)?;
    campaign.validate().map_err(Error::Ingest)?;
    let json = campaign_to_json(&campaign);
    let path = match out_file {
        Some(p) => p.to_path_buf(),
        None => cli.out.join("synthetic_campaign.json"),
    };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(&path, &json)?;
    let steps: usize = campaign.cases.iter().map(|c| c.steps.len()).sum();
    println!(
        "wrote {} ({} cases, {} steps, seed {})",
        path.display(),
        campaign.cases.len(),
        steps,
        spec.seed
    );
    Ok(())
}
