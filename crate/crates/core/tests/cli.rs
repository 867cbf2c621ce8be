use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fbpaug_core::augment::{transform, AugmentConfig};
use fbpaug_core::io::{read_image, read_rimg, Object};

fn fbpaug(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fbpaug"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = fbpaug(args);
    assert!(
        out.status.success(),
        "fbpaug {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn exit_and_stderr(args: &[&str]) -> (i32, String) {
    let out = fbpaug(args);
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn phantom_radon_fbp_chain() {
    let d = tempfile::tempdir().unwrap();
    let ph = d.path().join("p.rimg");
    let sino = d.path().join("s.rimg");
    let rec = d.path().join("r.rimg");
    ok(&["phantom", "--preset", "shepp-logan", "--size", "32", "-o", s(&ph)]);
    ok(&["radon", "-i", s(&ph), "-o", s(&sino), "--n-angles", "45"]);
    ok(&["fbp", "-i", s(&sino), "-o", s(&rec), "--filter", "kab", "--a", "-0.5", "--b", "1"]);
    match read_rimg(&sino).unwrap() {
        Object::Sinogram(sn) => {
            assert_eq!(sn.n_angles(), 45);
            assert_eq!(sn.n_detectors(), 33);
        }
        other => panic!("expected sinogram, got {}", other.kind()),
    }
    assert_eq!(read_image(&rec).unwrap().shape(), (33, 33));
}

#[test]
fn error_classes_have_distinct_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let good = d.path().join("g.rimg");
    ok(&["phantom", "--preset", "disk", "--size", "16", "--radius-frac", "0.5", "-o", s(&good)]);
    let bytes = fs::read(&good).unwrap();
    let out = d.path().join("o.rimg");

    let missing = d.path().join("missing.rimg");
    let (io, _) = exit_and_stderr(&["radon", "-i", s(&missing), "-o", s(&out)]);

    let magic = d.path().join("m.rimg");
    let mut b = bytes.clone();
    b[..4].copy_from_slice(b"XIMG");
    fs::write(&magic, b).unwrap();
    let (bad_magic, msg) = exit_and_stderr(&["radon", "-i", s(&magic), "-o", s(&out)]);
    assert_eq!(msg.lines().count(), 1, "{msg}");
    assert!(msg.contains("magic"));

    let short = d.path().join("t.rimg");
    fs::write(&short, &bytes[..bytes.len() - 1]).unwrap();
    let (truncated, msg) = exit_and_stderr(&["radon", "-i", s(&short), "-o", s(&out)]);
    assert!(msg.contains("truncated"));

    let kind = d.path().join("k.rimg");
    let header_end = 5 + bytes[5..].iter().position(|&c| c == b'\n').unwrap();
    let header = std::str::from_utf8(&bytes[..header_end]).unwrap();
    let mut b = header.replacen("\"image\"", "\"volume\"", 1).into_bytes();
    b.extend_from_slice(&bytes[header_end..]);
    fs::write(&kind, b).unwrap();
    let (unknown, msg) = exit_and_stderr(&["radon", "-i", s(&kind), "-o", s(&out)]);
    assert!(msg.contains("volume"), "{msg}");

    let (wrong_kind, _) = exit_and_stderr(&["fbp", "-i", s(&good), "-o", s(&out)]);
    let (usage, _) = exit_and_stderr(&["radon", "--no-such-flag"]);

    let codes = [io, bad_magic, truncated, unknown, wrong_kind, usage];
    assert_eq!(codes, [3, 4, 5, 6, 7, 2]);
}

#[test]
fn invalid_kernel_and_config_errors() {
    let d = tempfile::tempdir().unwrap();
    let ph = d.path().join("p.rimg");
    let sino = d.path().join("s.rimg");
    ok(&["phantom", "--size", "16", "-o", s(&ph)]);
    ok(&["radon", "-i", s(&ph), "-o", s(&sino), "--n-angles", "8"]);
    let out = d.path().join("r.rimg");
    let (code, _) =
        exit_and_stderr(&["fbp", "-i", s(&sino), "-o", s(&out), "--filter", "kab", "--a", "-2"]);
    assert_eq!(code, 9);

    let cfg = d.path().join("c.toml");
    fs::write(&cfg, "not_a_flag = 3\n").unwrap();
    let (code, msg) =
        exit_and_stderr(&["augment", "--config", s(&cfg), "-i", s(&ph), "-o", s(&out)]);
    assert_eq!(code, 8, "{msg}");

    fs::write(&cfg, "p_sharpen = 0.8\np_smooth = 0.8\n").unwrap();
    let (code, _) =
        exit_and_stderr(&["augment", "--config", s(&cfg), "-i", s(&ph), "-o", s(&out)]);
    assert_eq!(code, 8);
}

#[test]
fn flags_override_config_file() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("c.toml");
    fs::write(&cfg, "preset = \"disk\"\nsize = 24\nradius_frac = 0.5\nseed = 3\n").unwrap();
    let a = d.path().join("a.rimg");
    let b = d.path().join("b.rimg");
    ok(&["phantom", "--config", s(&cfg), "-o", s(&a)]);
    ok(&["--config", s(&cfg), "phantom", "-o", s(&b), "--size", "20"]);
    assert_eq!(read_image(&a).unwrap().shape(), (24, 24));
    assert_eq!(read_image(&b).unwrap().shape(), (20, 20));
}

#[test]
fn single_file_augment_matches_library_and_batch_item() {
    let d = tempfile::tempdir().unwrap();
    let batch = d.path().join("batch");
    fs::create_dir(&batch).unwrap();
    for i in 0..3 {
        let seed = i.to_string();
        let p = batch.join(format!("x{i}.rimg"));
        ok(&["phantom", "--preset", "lesions", "--size", "32", "--seed", &seed, "-o", s(&p)]);
    }
    let out_dir = d.path().join("out");
    let common = ["--seed", "7", "--mode", "fbpaug,noise,flips", "--p-sharpen", "0.5", "--p-smooth", "0.5"];
    let mut args = vec!["augment", "-i", s(&batch), "-o", s(&out_dir)];
    args.extend(common);
    ok(&args);

    let single = d.path().join("single.rimg");
    let src = batch.join("x2.rimg");
    let mut args = vec!["augment", "-i", s(&src), "-o", s(&single), "--index", "2"];
    args.extend(common);
    let log = ok(&args);
    assert!(log.contains("\"index\":2"));
    assert_eq!(fs::read(&single).unwrap(), fs::read(out_dir.join("x2.rimg")).unwrap());

    let cfg = AugmentConfig::from_toml_str(
        "modes = [\"fbpaug\", \"noise\", \"flips\"]\nseed = 7\np_sharpen = 0.5\np_smooth = 0.5\n",
    )
    .unwrap();
    let img = read_image(&src).unwrap();
    let lib = transform(&img, &cfg, 2).unwrap().image;
    let cli = read_image(&single).unwrap();
    // The file stores f32; the library result rounds to the same values.
    assert_eq!(cli.shape(), lib.shape());
    for (c, l) in cli.values().iter().zip(lib.values()) {
        assert_eq!(*c, *l as f32 as f64);
    }
    let log = fs::read_to_string(out_dir.join("augment_log.jsonl")).unwrap();
    assert_eq!(log.lines().count(), 3);
}

#[test]
fn export_pgm_layout() {
    let d = tempfile::tempdir().unwrap();
    let ph = d.path().join("p.rimg");
    let pgm = d.path().join("p.pgm");
    ok(&["phantom", "--preset", "disk", "--size", "16", "--radius-frac", "0.5", "-o", s(&ph)]);
    ok(&["export-pgm", "-i", s(&ph), "-o", s(&pgm), "--center", "0.5", "--width", "1"]);
    let bytes = fs::read(&pgm).unwrap();
    let head = b"P5\n16 16\n65535\n";
    assert_eq!(&bytes[..head.len()], head);
    assert_eq!(bytes.len(), head.len() + 2 * 256);
    let px = |r: usize, c: usize| {
        let i = head.len() + 2 * (r * 16 + c);
        u16::from_be_bytes([bytes[i], bytes[i + 1]])
    };
    assert_eq!(px(0, 0), 0);
    assert_eq!(px(8, 8), 65535);
}

#[test]
fn help_lists_subcommands() {
    let out = ok(&["--help"]);
    for sub in ["phantom", "radon", "fbp", "augment", "pair", "segment", "eval", "export-pgm"] {
        assert!(out.contains(sub), "{sub} missing from help");
    }
    assert!(ok(&["augment", "--help"]).contains("--p-sharpen"));
}
