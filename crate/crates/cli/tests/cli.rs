use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use phlab_core::datasets::{generate_synthetic, SyntheticSpec};
use phlab_core::imaging::write_ppm;
use tempfile::TempDir;

fn phlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phlab"))
        .current_dir(dir)
        .env_remove("PHLAB_THREADS")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Writes `per_class` synthetic images for each of `classes` classes as
/// `root/<class>/<n>.ppm` and returns the root.
fn fixture_dir(tmp: &TempDir, classes: usize, per_class: usize) -> PathBuf {
    let ds = generate_synthetic(&SyntheticSpec {
        class_count: classes,
        per_class,
        image_size: 32,
        rng_seed: 3,
    });
    let root = tmp.path().join("data");
    for (i, img) in ds.images.iter().enumerate() {
        let dir = root.join(&ds.class_names[ds.labels[i]]);
        fs::create_dir_all(&dir).unwrap();
        write_ppm(img, dir.join(format!("{i:03}.ppm"))).unwrap();
    }
    root
}

fn first_image(root: &Path) -> PathBuf {
    let class = fs::read_dir(root).unwrap().map(|e| e.unwrap().path()).min().unwrap();
    fs::read_dir(class).unwrap().map(|e| e.unwrap().path()).min().unwrap()
}

fn two_images(tmp: &TempDir) -> (String, String) {
    let root = fixture_dir(tmp, 2, 1);
    let mut files: Vec<PathBuf> = fs::read_dir(&root)
        .unwrap()
        .flat_map(|c| fs::read_dir(c.unwrap().path()).unwrap().map(|e| e.unwrap().path()))
        .collect();
    files.sort();
    (files[0].display().to_string(), files[1].display().to_string())
}

#[test]
fn hash_is_stable_and_hex() {
    let tmp = TempDir::new().unwrap();
    let (a, _) = two_images(&tmp);
    let o = phlab(tmp.path(), &["hash", &a, &a]);
    assert!(o.status.success(), "{}", stderr(&o));
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], lines[1]);
    let hex = lines[0].split_whitespace().next().unwrap();
    assert_eq!(hex.len(), 24);
    assert!(hex.chars().all(|c| c.is_ascii_hexdigit() && !c.is_ascii_uppercase()));
}

#[test]
fn sha_defense_changes_printed_hash() {
    let tmp = TempDir::new().unwrap();
    let (a, _) = two_images(&tmp);
    let plain = stdout(&phlab(tmp.path(), &["hash", &a]));
    let o = phlab(tmp.path(), &["--defense", "sha", "hash", &a]);
    assert!(o.status.success());
    let sha = stdout(&o);
    let plain_hex = plain.split_whitespace().next().unwrap();
    let sha_hex = sha.split_whitespace().next().unwrap();
    assert_ne!(plain_hex, sha_hex);
    assert!(sha.contains(&format!("(perceptual {plain_hex})")), "{sha}");
}

#[test]
fn missing_and_corrupt_files_exit_2() {
    let tmp = TempDir::new().unwrap();
    let o = phlab(tmp.path(), &["hash", "no-such.ppm"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no-such.ppm"));
    fs::write(tmp.path().join("bad.ppm"), b"P6\n2 2\n255\nxx").unwrap();
    let o = phlab(tmp.path(), &["hash", "bad.ppm"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_errors_exit_1() {
    let tmp = TempDir::new().unwrap();
    let (a, _) = two_images(&tmp);
    assert_eq!(phlab(tmp.path(), &["--set", "colour=red", "hash", &a]).status.code(), Some(1));
    assert_eq!(phlab(tmp.path(), &["--set", "seed=abc", "hash", &a]).status.code(), Some(1));
    assert_eq!(phlab(tmp.path(), &["--defense", "rot13", "hash", &a]).status.code(), Some(1));
    fs::write(tmp.path().join("bad.conf"), "unknown = 1\n").unwrap();
    assert_eq!(phlab(tmp.path(), &["--config", "bad.conf", "hash", &a]).status.code(), Some(1));
    assert_eq!(phlab(tmp.path(), &["hash"]).status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_phlab"))
        .current_dir(tmp.path())
        .env("PHLAB_THREADS", "many")
        .args(["hash", &a])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn flags_override_config_file() {
    let tmp = TempDir::new().unwrap();
    let (a, _) = two_images(&tmp);
    fs::write(tmp.path().join("lab.conf"), "# lab settings\nseed = 5\ndefense = sha\n").unwrap();
    let from_file = stdout(&phlab(tmp.path(), &["--config", "lab.conf", "hash", &a]));
    let direct = stdout(&phlab(tmp.path(), &["--seed", "5", "--defense", "sha", "hash", &a]));
    assert_eq!(from_file, direct);
    let overridden = stdout(&phlab(tmp.path(), &["--config", "lab.conf", "--seed", "6", "hash", &a]));
    let direct6 = stdout(&phlab(tmp.path(), &["--seed", "6", "--defense", "sha", "hash", &a]));
    assert_eq!(overridden, direct6);
    assert_ne!(overridden, from_file);
}

#[test]
fn default_seed_is_42() {
    let tmp = TempDir::new().unwrap();
    let (a, _) = two_images(&tmp);
    let implicit = stdout(&phlab(tmp.path(), &["hash", &a]));
    let explicit = stdout(&phlab(tmp.path(), &["--seed", "42", "hash", &a]));
    assert_eq!(implicit, explicit);
}

#[test]
fn show_config_round_trips_through_config_file() {
    let tmp = TempDir::new().unwrap();
    let o = phlab(tmp.path(), &["--set", "ga.iterations=7", "show-config"]);
    assert!(o.status.success());
    fs::write(tmp.path().join("dump.conf"), stdout(&o)).unwrap();
    let again = phlab(tmp.path(), &["--config", "dump.conf", "show-config"]);
    assert_eq!(stdout(&again), stdout(&o));
    assert!(stdout(&o).contains("ga.iterations = 7"));
}

#[test]
fn unknown_experiment_lists_valid_names() {
    let tmp = TempDir::new().unwrap();
    let o = phlab(tmp.path(), &["experiment", "bogus"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    for name in ["sweep", "evasion", "collision", "extraction", "defense"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn sweep_reruns_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    for out in ["a", "b"] {
        let o = phlab(
            tmp.path(),
            &["--seed", "7", "experiment", "sweep", "--pairs", "4", "--steps", "21", "--out", out],
        );
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let names = ["sweep.csv", "sweep.svg", "sweep_summary.csv", "sweep_config.txt"];
    for name in names {
        let a = fs::read(tmp.path().join("a").join(name)).unwrap();
        let b = fs::read(tmp.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
    let svg = fs::read_to_string(tmp.path().join("a/sweep.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 3);
}

#[test]
fn evasion_pairs_set_csv_rows() {
    let tmp = TempDir::new().unwrap();
    let o = phlab(tmp.path(), &["experiment", "evasion", "--pairs", "10", "--out", "r"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("r/evasion.csv")).unwrap();
    assert_eq!(csv.lines().count(), 11, "header plus 10 rows");
    assert!(stdout(&o).contains("success_rate"));
}

#[test]
fn defense_experiment_emits_both_variants() {
    let tmp = TempDir::new().unwrap();
    let o = phlab(
        tmp.path(),
        &[
            "--set", "ga.iterations=2",
            "--set", "ga.population_start=12",
            "--set", "ga.population_end=4",
            "--set", "extraction.epochs=1",
            "--set", "synthetic.classes=3",
            "experiment", "defense",
            "--targets-per-class", "1",
            "--pairs", "2",
            "--steps", "11",
            "--out", "r",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    for name in ["collision_none", "collision_sha", "extraction_none", "extraction_sha", "sweep_sha"] {
        let csv = tmp.path().join("r").join(format!("{name}.csv"));
        assert!(csv.exists(), "{name} missing");
    }
    let collision = fs::read_to_string(tmp.path().join("r/collision_sha.csv")).unwrap();
    assert_eq!(collision.lines().count(), 4, "3 classes x 1 target");
}

#[test]
fn attack_evade_reports_alpha_ssim_and_flag() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = two_images(&tmp);
    let o = phlab(
        tmp.path(),
        &["attack", "evade", "--source", &a, "--carrier", &b, "--output", "adv.ppm", "--out", "r"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let line = stdout(&o);
    assert!(line.starts_with("alpha* ") && line.contains(" ssim ") && line.contains("evaded true"), "{line}");
    assert!(tmp.path().join("adv.ppm").exists());
    assert!(tmp.path().join("r/attack_evade.csv").exists());
    let adv_hash = stdout(&phlab(tmp.path(), &["hash", "adv.ppm"]));
    let src_hash = stdout(&phlab(tmp.path(), &["hash", &a]));
    assert_ne!(adv_hash.split_whitespace().next(), src_hash.split_whitespace().next());
}

#[test]
fn attack_collide_reaches_member_hash() {
    let tmp = TempDir::new().unwrap();
    let root = fixture_dir(&tmp, 1, 1);
    let img = first_image(&root);
    let hex = stdout(&phlab(tmp.path(), &["hash", img.to_str().unwrap()]));
    let hex = hex.split_whitespace().next().unwrap().to_string();
    let o = phlab(
        tmp.path(),
        &[
            "--set", "ga.iterations=1",
            "attack", "collide",
            "--target-hash", &hex,
            "--data", root.to_str().unwrap(),
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("best fitness 1.000000"), "{}", stdout(&o));
}

#[test]
fn attack_collide_rejects_bad_hash() {
    let tmp = TempDir::new().unwrap();
    let o = phlab(tmp.path(), &["attack", "collide", "--target-hash", "xyz"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn attack_extract_single_class_is_exact() {
    let tmp = TempDir::new().unwrap();
    let root = fixture_dir(&tmp, 1, 4);
    let o = phlab(
        tmp.path(),
        &["--set", "extraction.epochs=1", "attack", "extract", "--data", root.to_str().unwrap()],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("accuracy 1.0000"), "{}", stdout(&o));
}

#[test]
fn threads_flag_does_not_change_results() {
    let tmp = TempDir::new().unwrap();
    for (out, threads) in [("one", "1"), ("two", "2")] {
        let o = phlab(
            tmp.path(),
            &["--threads", threads, "experiment", "evasion", "--pairs", "6", "--out", out],
        );
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(
        fs::read(tmp.path().join("one/evasion.csv")).unwrap(),
        fs::read(tmp.path().join("two/evasion.csv")).unwrap()
    );
}
