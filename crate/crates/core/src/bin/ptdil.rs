use std::path::PathBuf;

fn main() {
    let output_dir = std::env::var_os(pt_dilation::cli::OUTPUT_DIR_ENV).map(PathBuf::from);
    let code = pt_dilation::cli::main_with_args(
        std::env::args_os(),
        output_dir.as_deref(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}
