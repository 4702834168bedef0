use liouville_core::dirichlet::{solve, DirichletProblem};
use liouville_core::generators::{build_model_tree, ModelTreeSpec};
use liouville_core::io::{
    parse_graph, parse_graph_with_limit, parse_problem, read_graph, read_problem, write_graph, write_problem,
};
use liouville_core::Error;

const PATH_PROBLEM: &str = "\
# path 0 - 1 - 2, harmonic in the middle
graph 3 0
mu 0 1
mu 1 1
mu 2 1
edge 0 1 1
edge 1 2 1
omega 1
dirichlet-g 2 2
";

#[test]
fn problem_file_solves_by_hand() {
    let p = parse_problem(PATH_PROBLEM).unwrap();
    assert_eq!(p.interior, vec![1]);
    let problem = DirichletProblem::new(&p.graph, &p.potential, p.interior.clone(), p.f.clone(), p.g.clone()).unwrap();
    assert_eq!(solve(&problem).unwrap().values(), &[0.0, 1.0, 2.0]);
}

#[test]
fn files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let tree = build_model_tree(&ModelTreeSpec::new(3, 4, 0.75)).unwrap();
    let path = dir.path().join("tree.graph");
    write_graph(&path, &tree).unwrap();
    assert_eq!(read_graph(&path).unwrap(), tree);

    let problem = parse_problem(PATH_PROBLEM).unwrap();
    let path = dir.path().join("path.problem");
    write_problem(&path, &problem).unwrap();
    assert_eq!(read_problem(&path).unwrap(), problem);
}

#[test]
fn tree_header_matches_generator() {
    let parsed = parse_graph("tree 2 5 1.5\n").unwrap();
    assert_eq!(parsed, build_model_tree(&ModelTreeSpec::new(2, 5, 1.5)).unwrap());
}

#[test]
fn errors_carry_line_numbers() {
    let cases = [
        ("graph 2 0\nmu 0 1\nmu 1 1\nedge 0 1 x\n", 4),
        ("graph 2 0\nmu 0 1\nmu 1 1\nedge 0 1 1\nedge 1 0 2\n", 5),
        ("graph 2 0\nmu 0 1\nbogus 1\n", 3),
        ("graph 2 0\nmu 0 1\nmu 1 1\nedge 0 5 1\n", 4),
    ];
    for (text, line) in cases {
        match parse_graph(text) {
            Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
            other => panic!("{text:?}: {other:?}"),
        }
    }
}

#[test]
fn missing_file_is_an_io_error() {
    assert!(matches!(read_graph("/nonexistent/graph.txt"), Err(Error::Io(_))));
}

#[test]
fn vertex_limit_applies_to_tree_header() {
    assert!(matches!(
        parse_graph_with_limit("tree 2 20 1\n", 1000),
        Err(Error::SizeOverflow { .. }) | Err(Error::Parse { .. })
    ));
}
