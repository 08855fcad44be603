use std::path::{Path, PathBuf};

use super::{DatasetError, LabeledDataset, Split};
use crate::imaging::read_image;

const IMAGE_EXTENSIONS: &[&str] = &["ppm", "pgm", "pnm", "png"];

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>, DatasetError> {
    let mut entries = std::fs::read_dir(dir)
        .map_err(io_err(dir))?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(io_err(dir))?;
    entries.sort();
    Ok(entries)
}

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
}

/// Loads `root/<class_name>/<image>` trees.
///
/// Classes are the sorted subdirectory names; files are read in lexicographic
/// order and files without an image extension are ignored. Each image's id is
/// `<class_name>/<file_stem>`. Any undecodable image aborts the load.
pub fn load_directory(root: impl AsRef<Path>) -> Result<LabeledDataset, DatasetError> {
    let root = root.as_ref();
    let class_dirs: Vec<PathBuf> = sorted_entries(root)?
        .into_iter()
        .filter(|p| p.is_dir())
        .collect();
    let mut class_names = Vec::new();
    let (mut images, mut labels, mut sources) = (Vec::new(), Vec::new(), Vec::new());
    for dir in &class_dirs {
        let name = dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let label = class_names.len();
        for file in sorted_entries(dir)?.into_iter().filter(|p| p.is_file() && is_image(p)) {
            let img = read_image(&file).map_err(|source| DatasetError::File {
                path: file.display().to_string(),
                source,
            })?;
            let stem = file.file_stem().unwrap_or_default().to_string_lossy();
            let rel = file.strip_prefix(root).unwrap_or(&file);
            images.push(img.with_id(format!("{name}/{stem}")));
            labels.push(label);
            sources.push(rel.to_string_lossy().replace('\\', "/"));
        }
        class_names.push(name);
    }
    if images.is_empty() {
        return Err(DatasetError::Empty(root.display().to_string()));
    }
    LabeledDataset::new(images, labels, class_names, Split::Train, sources)
}

/// Writes a `path,label` manifest, one row per image, labels as class names.
pub fn write_manifest(ds: &LabeledDataset, path: impl AsRef<Path>) -> Result<(), DatasetError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["path", "label"])?;
    for (src, label) in ds.sources.iter().zip(&ds.labels) {
        w.write_record([src.as_str(), ds.class_names[*label].as_str()])?;
    }
    w.flush().map_err(|e| DatasetError::Manifest(e.into()))?;
    Ok(())
}
