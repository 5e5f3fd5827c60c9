//! Atomic run directories: everything is written under a hidden temporary
//! directory next to the target and renamed into place at the end.

use std::fs;
use std::path::{Path, PathBuf};

use crate::RunError;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `files` and `manifest.json` into `root/name`, replacing any
/// previous directory of that name.
pub fn write_run(root: &Path, name: &str, files: &[(String, String)], manifest: &str) -> Result<PathBuf, RunError> {
    fs::create_dir_all(root).map_err(io_err(root))?;
    let target = root.join(name);
    let staging = root.join(format!(".{name}.tmp-{}", std::process::id()));
    if staging.exists() {
        fs::remove_dir_all(&staging).map_err(io_err(&staging))?;
    }
    fs::create_dir(&staging).map_err(io_err(&staging))?;
    let write_all = || -> Result<(), RunError> {
        for (rel, contents) in files {
            let path = staging.join(rel);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent).map_err(io_err(parent))?;
            }
            fs::write(&path, contents).map_err(io_err(&path))?;
        }
        let path = staging.join("manifest.json");
        fs::write(&path, manifest).map_err(io_err(&path))
    };
    if let Err(e) = write_all() {
        let _ = fs::remove_dir_all(&staging);
        return Err(e);
    }
    if target.exists() {
        fs::remove_dir_all(&target).map_err(io_err(&target))?;
    }
    fs::rename(&staging, &target).map_err(io_err(&target))?;
    Ok(target)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replaces_previous_run() {
        let dir = tempfile::tempdir().unwrap();
        let files = vec![("a/b.csv".to_string(), "x\n".to_string())];
        let p = write_run(dir.path(), "run", &files, "{}").unwrap();
        assert_eq!(fs::read_to_string(p.join("a/b.csv")).unwrap(), "x\n");
        let p = write_run(dir.path(), "run", &[], "{\"k\":1}").unwrap();
        assert!(!p.join("a").exists());
        assert_eq!(fs::read_to_string(p.join("manifest.json")).unwrap(), "{\"k\":1}");
        let leftovers: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(leftovers.len(), 1);
    }
}
