//! Running provers as subprocesses under a wall-clock deadline.

use std::env;
use std::io::Read;
use std::os::unix::process::CommandExt;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use crate::config::ProverDef;
use crate::szs::{first_status, Outcome};

pub const PROVER_PATH_VAR: &str = "SUMOK2SET_PROVER_PATH";
/// Allowed overrun of a child past its deadline.
pub const GRACE: Duration = Duration::from_secs(2);
const POLL: Duration = Duration::from_millis(5);

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub problem: String,
    pub prover: String,
    pub wall: f64,
    pub cpu: f64,
    pub outcome: Outcome,
    pub szs_line: String,
}

impl RunRecord {
    pub const TSV_HEADER: &'static str = "problem\tprover\twall_s\tcpu_s\toutcome\tszs";

    pub fn tsv(&self) -> String {
        format!(
            "{}\t{}\t{:.3}\t{:.3}\t{}\t{}",
            self.problem,
            self.prover,
            self.wall,
            self.cpu,
            self.outcome,
            self.szs_line.replace('\t', " ")
        )
    }
}

/// Resolves a command name: paths containing `/` are used as given, bare names are
/// searched in the prover path variable and then in `PATH`.
pub fn find_executable(command: &str) -> Option<PathBuf> {
    if command.contains('/') {
        let p = PathBuf::from(command);
        return p.is_file().then_some(p);
    }
    let mut dirs: Vec<PathBuf> = Vec::new();
    for var in [PROVER_PATH_VAR, "PATH"] {
        if let Some(v) = env::var_os(var) {
            dirs.extend(env::split_paths(&v));
        }
    }
    dirs.into_iter().map(|d| d.join(command)).find(|p| p.is_file())
}

fn rusage_seconds(r: &libc::rusage) -> f64 {
    let tv = |t: libc::timeval| t.tv_sec as f64 + t.tv_usec as f64 / 1e6;
    tv(r.ru_utime) + tv(r.ru_stime)
}

/// Runs one prover on one problem file. The child leads its own process group, and
/// the whole group is killed at the deadline and again once the child is reaped.
pub fn run_one(prover: &ProverDef, problem: &Path, label: &str, timeout: f64) -> RunRecord {
    let mut record = RunRecord {
        problem: label.to_string(),
        prover: prover.name.clone(),
        wall: 0.0,
        cpu: 0.0,
        outcome: Outcome::Error,
        szs_line: String::new(),
    };
    let Some(exe) = find_executable(&prover.command) else {
        record.szs_line = format!("executable not found: {}", prover.command);
        return record;
    };
    let start = Instant::now();
    let spawned = Command::new(&exe)
        .args(prover.argv(problem, timeout))
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .process_group(0)
        .spawn();
    let mut child = match spawned {
        Ok(c) => c,
        Err(e) => {
            record.szs_line = format!("spawn failed: {e}");
            return record;
        }
    };
    let pid = child.id() as libc::pid_t;
    let mut stdout = child.stdout.take().expect("piped stdout");
    let reader = thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stdout.read_to_end(&mut buf);
        String::from_utf8_lossy(&buf).into_owned()
    });

    let deadline = start + Duration::from_secs_f64(timeout);
    let mut timed_out = false;
    let mut usage: libc::rusage = unsafe { std::mem::zeroed() };
    let mut status: libc::c_int = 0;
    loop {
        // SAFETY: pid is our unreaped child; status and usage are valid out-pointers.
        let r = unsafe { libc::wait4(pid, &mut status, libc::WNOHANG, &mut usage) };
        if r == pid || r < 0 {
            break;
        }
        if Instant::now() >= deadline {
            timed_out = true;
            // SAFETY: signalling the process group we created.
            unsafe { libc::killpg(pid, libc::SIGKILL) };
            unsafe { libc::wait4(pid, &mut status, 0, &mut usage) };
            break;
        }
        thread::sleep(POLL);
    }
    // Stray descendants would otherwise hold the pipe open.
    unsafe { libc::killpg(pid, libc::SIGKILL) };
    record.wall = start.elapsed().as_secs_f64();
    record.cpu = rusage_seconds(&usage);
    let output = reader.join().unwrap_or_default();

    match first_status(&output) {
        _ if timed_out => {
            record.outcome = Outcome::Timeout;
            record.szs_line = format!("killed after {timeout}s");
        }
        Some((line, word)) => {
            record.outcome = Outcome::from_status(word);
            record.szs_line = line.to_string();
        }
        None => record.outcome = Outcome::GaveUp,
    }
    record
}

/// One problem file to run, with its table label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Job {
    pub label: String,
    pub path: PathBuf,
}

/// Runs every (problem, prover) pair on `jobs` workers. Records come back sorted by
/// problem label and then prover configuration order.
pub fn run_all(problems: &[Job], provers: &[ProverDef], timeout: f64, jobs: usize) -> Vec<RunRecord> {
    let pairs: Vec<(usize, usize)> = (0..problems.len())
        .flat_map(|i| (0..provers.len()).map(move |j| (i, j)))
        .collect();
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel();
    thread::scope(|s| {
        for _ in 0..jobs.max(1).min(pairs.len().max(1)) {
            let tx = tx.clone();
            let (next, pairs) = (&next, &pairs);
            s.spawn(move || loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(i, j)) = pairs.get(k) else { break };
                let rec = run_one(&provers[j], &problems[i].path, &problems[i].label, timeout);
                if tx.send((i, j, rec)).is_err() {
                    break;
                }
            });
        }
    });
    drop(tx);
    let mut out: Vec<(usize, usize, RunRecord)> = rx.into_iter().collect();
    out.sort_by(|a, b| (&problems[a.0].label, a.1).cmp(&(&problems[b.0].label, b.1)));
    out.into_iter().map(|(_, _, r)| r).collect()
}
