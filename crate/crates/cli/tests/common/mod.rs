#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

pub fn kb_path() -> PathBuf {
    fixtures().join("mini-merge.kif")
}

pub fn query_paths() -> Vec<PathBuf> {
    ["tqg3", "tqg11", "tqg22alt4", "tqg27", "wordex"]
        .iter()
        .map(|q| fixtures().join(format!("queries/{q}.kif")))
        .collect()
}

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sumok2set"))
}

pub fn run_bin(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

/// A scripted prover. Invoked as `sh stub.sh NAME FILE`, it looks for a line
/// `% expect NAME WORD` in the problem and prints `SZS status WORD`. `Silent` prints
/// nothing; `Sleep` records its pid and a background child's pid, then blocks.
pub const STUB: &str = r#"#!/bin/sh
name=$1
file=$2
word=$(sed -n "s/^% expect $name \([A-Za-z]*\)$/\1/p" "$file" | head -n 1)
case "$word" in
  Silent) echo "no verdict" ;;
  Sleep)
    echo $$ > "$file.$name.pid"
    sleep 30 &
    echo $! > "$file.$name.child"
    wait
    ;;
  "") echo "% SZS status Error (no script for $name)" ;;
  *) echo "% SZS status $word for $file" ;;
esac
"#;

pub fn write_stub(dir: &Path) -> PathBuf {
    let p = dir.join("stub.sh");
    fs::write(&p, STUB).unwrap();
    p
}

/// True once the process is gone or a zombie.
pub fn process_gone(pid: u32) -> bool {
    match fs::read_to_string(format!("/proc/{pid}/stat")) {
        Err(_) => true,
        Ok(stat) => stat
            .rsplit_once(')')
            .and_then(|(_, rest)| rest.split_whitespace().next())
            .is_some_and(|s| s == "Z" || s == "X"),
    }
}
