macro_rules! example {
    ($module:ident, $file:literal, $test:ident) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(train_track_check, "train_track_check.rs", train_track_check_runs);
example!(dilatation, "dilatation.rs", dilatation_runs);
example!(nielsen_paths, "nielsen_paths.rs", nielsen_paths_runs);
example!(whitehead_graphs, "whitehead_graphs.rs", whitehead_graphs_runs);
example!(lone_axis, "lone_axis.rs", lone_axis_runs);
example!(fold_line, "fold_line.rs", fold_line_runs);
example!(conjugate_powers, "conjugate_powers.rs", conjugate_powers_runs);
