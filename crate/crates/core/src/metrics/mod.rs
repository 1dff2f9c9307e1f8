//! Class- and method-level code metrics.
//!
//! The 61 features form a fixed vector: the 41 class metrics in the order of
//! [`CLASS_FEATURES`], then the 20 method metrics of [`METHOD_FEATURES`]
//! under a `method_` prefix.

mod cohesion;

use std::collections::BTreeSet;

pub use cohesion::{cohesion_access_sets, lcom, tcc_lcc, tight_and_loose_cohesion};

use crate::java::{lexer::is_primitive, Body, ClassModel, InvocationRecord, MethodModel, StatementKind};

pub const FEATURE_COUNT: usize = 61;

macro_rules! metric_vector {
    ($(#[$meta:meta])* $name:ident, $names:ident, $len:literal { $($field:ident : $ty:ty => $label:literal),* $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Default, PartialEq)]
        #[allow(non_snake_case)]
        pub struct $name {
            $(pub $field: $ty,)*
        }

        pub const $names: [&str; $len] = [$($label),*];

        impl $name {
            pub fn to_array(&self) -> [f64; $len] {
                [$(self.$field as f64),*]
            }
        }
    };
}

metric_vector!(
    /// The 41 class-level metrics.
    ClassMetricVector, CLASS_FEATURES, 41 {
        anonymous_classes_qty: usize => "AnonymousClassesQty",
        assignments_qty: usize => "AssignmentsQty",
        cbo: usize => "Cbo",
        comparisons_qty: usize => "ComparisonsQty",
        lambdas_qty: usize => "LambdasQty",
        lcom: usize => "Lcom",
        loc: usize => "Loc",
        lcc: f64 => "LCC",
        loop_qty: usize => "LoopQty",
        math_operations_qty: usize => "MathOperationsQty",
        max_nested_blocks: usize => "MaxNestedBlocks",
        nosi: usize => "Nosi",
        number_of_abstract_methods: usize => "NumberOfAbstractMethods",
        number_of_default_fields: usize => "NumberOfDefaultFields",
        number_of_default_methods: usize => "NumberOfDefaultMethods",
        number_of_fields: usize => "NumberOfFields",
        number_of_final_fields: usize => "NumberOfFinalFields",
        number_of_final_methods: usize => "NumberOfFinalMethods",
        number_of_methods: usize => "NumberOfMethods",
        number_of_private_fields: usize => "NumberOfPrivateFields",
        number_of_private_methods: usize => "NumberOfPrivateMethods",
        number_of_protected_fields: usize => "NumberOfProtectedFields",
        number_of_protected_methods: usize => "NumberOfProtectedMethods",
        number_of_public_fields: usize => "NumberOfPublicFields",
        number_of_public_methods: usize => "NumberOfPublicMethods",
        number_of_static_fields: usize => "NumberOfStaticFields",
        number_of_static_methods: usize => "NumberOfStaticMethods",
        number_of_synchronized_fields: usize => "NumberOfSynchronizedFields",
        number_of_synchronized_methods: usize => "NumberOfSynchronizedMethods",
        numbers_qty: usize => "NumbersQty",
        parenthesized_exps_qty: usize => "ParenthesizedExpsQty",
        return_qty: usize => "ReturnQty",
        rfc: usize => "Rfc",
        string_literals_qty: usize => "StringLiteralsQty",
        sub_classes_qty: usize => "SubClassesQty",
        try_catch_qty: usize => "TryCatchQty",
        unique_words_qty: usize => "UniqueWordsQty",
        variables_qty: usize => "VariablesQty",
        wmc: usize => "Wmc",
        tcc: f64 => "TCC",
        is_inner_class: usize => "isInnerClass",
    }
);

metric_vector!(
    /// The 20 method-level metrics.
    MethodMetricVector, METHOD_FEATURES, 20 {
        anonymous_classes_qty: usize => "AnonymousClassesQty",
        assignments_qty: usize => "AssignmentsQty",
        cbo: usize => "Cbo",
        comparisons_qty: usize => "ComparisonsQty",
        lambdas_qty: usize => "LambdasQty",
        loc: usize => "Loc",
        loop_qty: usize => "LoopQty",
        math_operations_qty: usize => "MathOperationsQty",
        max_nested_blocks: usize => "MaxNestedBlocks",
        numbers_qty: usize => "NumbersQty",
        parameters_qty: usize => "ParametersQty",
        parenthesized_exps_qty: usize => "ParenthesizedExpsQty",
        return_qty: usize => "ReturnQty",
        rfc: usize => "Rfc",
        string_literals_qty: usize => "StringLiteralsQty",
        sub_classes_qty: usize => "SubClassesQty",
        try_catch_qty: usize => "TryCatchQty",
        unique_words_qty: usize => "UniqueWordsQty",
        variables_qty: usize => "VariablesQty",
        wmc: usize => "Wmc",
    }
);

/// All 61 column names in vector order.
pub fn feature_names() -> Vec<String> {
    CLASS_FEATURES
        .iter()
        .map(|s| s.to_string())
        .chain(METHOD_FEATURES.iter().map(|s| format!("method_{s}")))
        .collect()
}

/// Concatenated class + method features.
pub fn feature_vector(class: &ClassMetricVector, method: &MethodMetricVector) -> Vec<f64> {
    let mut v = class.to_array().to_vec();
    v.extend(method.to_array());
    v
}

/// Features of every method of every class in a parsed unit, as
/// `(class qualified name, method signature, 61 features)`.
pub fn unit_features(model: &crate::java::CodeModel) -> Vec<(String, String, Vec<f64>)> {
    let mut out = Vec::new();
    for class in &model.classes {
        let cv = compute_class_metrics(class);
        for method in &class.methods {
            let mv = compute_method_metrics(method, class);
            out.push((class.qualified_name.clone(), method.signature.clone(), feature_vector(&cv, &mv)));
        }
    }
    out
}

/// Cyclomatic complexity of one body: 1 plus decision points.
pub fn cyclomatic_complexity(body: &Body) -> usize {
    let tree = &body.tree;
    let cases = tree
        .iter()
        .filter(|s| s.kind == StatementKind::SwitchCase && s.canonical_text.starts_with("case"))
        .count();
    1 + tree.count(StatementKind::If)
        + tree.count(StatementKind::For)
        + tree.count(StatementKind::While)
        + tree.count(StatementKind::Do)
        + tree.count(StatementKind::Catch)
        + cases
        + body.facts.ternaries
        + body.facts.logical_operators
}

fn loops(body: &Body) -> usize {
    body.tree.count(StatementKind::For) + body.tree.count(StatementKind::While) + body.tree.count(StatementKind::Do)
}

fn try_catch(body: &Body) -> usize {
    body.tree.count(StatementKind::Try) + body.tree.count(StatementKind::Catch)
}

fn leading_segment(receiver: &str) -> &str {
    let end = receiver.find(|c: char| !(c.is_alphanumeric() || c == '_' || c == '$')).unwrap_or(receiver.len());
    &receiver[..end]
}

/// Receiver type names of static-looking invocations: receiver starts with
/// an uppercase letter and does not name a local, parameter or field.
fn static_receivers<'a>(
    invocations: &'a [InvocationRecord],
    locals: &BTreeSet<String>,
    params: &[&str],
    fields: &BTreeSet<&str>,
) -> Vec<&'a str> {
    invocations
        .iter()
        .filter_map(|inv| {
            let head = leading_segment(&inv.receiver);
            let upper = inv.receiver.chars().next().is_some_and(char::is_uppercase);
            (upper && !head.is_empty() && !locals.contains(head) && !params.contains(&head) && !fields.contains(head))
                .then_some(head)
        })
        .collect()
}

fn coupled_types<'a>(
    names: impl Iterator<Item = &'a str>,
    class: &ClassModel,
    extra_type_params: &[String],
) -> BTreeSet<&'a str> {
    names
        .filter(|n| {
            !is_primitive(n)
                && *n != "var"
                && *n != class.simple_name
                && *n != class.qualified_name
                && !class.type_parameters.iter().any(|t| t == n)
                && !extra_type_params.iter().any(|t| t == n)
        })
        .collect()
}

pub fn compute_method_metrics(method: &MethodModel, enclosing: &ClassModel) -> MethodMetricVector {
    let body = &method.body;
    let facts = &body.facts;
    let params: Vec<&str> = method.parameters.iter().map(|p| p.name.as_str()).collect();
    let fields = enclosing.field_names();
    let statics = static_receivers(&facts.invocations, &facts.declared_names, &params, &fields);
    let cbo = coupled_types(
        facts.referenced_types.iter().map(String::as_str).chain(statics),
        enclosing,
        &method.type_parameters,
    )
    .len();
    let callees: BTreeSet<&str> = facts.invocations.iter().map(|i| i.callee.as_str()).collect();

    MethodMetricVector {
        anonymous_classes_qty: body.tree.count(StatementKind::AnonymousClassBody),
        assignments_qty: facts.assignments,
        cbo,
        comparisons_qty: facts.comparisons,
        lambdas_qty: body.tree.count(StatementKind::LambdaBody),
        loc: body.code_lines,
        loop_qty: loops(body),
        math_operations_qty: facts.math_operations,
        max_nested_blocks: facts.max_nested_blocks,
        numbers_qty: facts.numbers,
        parameters_qty: method.parameters.len(),
        parenthesized_exps_qty: facts.parenthesized,
        return_qty: body.tree.count(StatementKind::Return),
        rfc: callees.len(),
        string_literals_qty: facts.string_literals,
        sub_classes_qty: body.tree.count(StatementKind::LocalClass),
        try_catch_qty: try_catch(body),
        unique_words_qty: body.words.len(),
        variables_qty: facts.variables,
        wmc: cyclomatic_complexity(body),
    }
}

pub fn compute_class_metrics(class: &ClassModel) -> ClassMetricVector {
    use crate::java::Visibility as V;

    let fields = class.field_names();
    let bodies: Vec<(&Body, Vec<&str>)> = class
        .methods
        .iter()
        .map(|m| (&m.body, m.parameters.iter().map(|p| p.name.as_str()).collect()))
        .chain(class.initializers.iter().map(|b| (b, Vec::new())))
        .collect();
    let sum = |f: &dyn Fn(&Body) -> usize| bodies.iter().map(|(b, _)| f(b)).sum::<usize>();

    let mut statics = Vec::new();
    let mut callees = BTreeSet::new();
    for (body, params) in &bodies {
        statics.extend(static_receivers(&body.facts.invocations, &body.facts.declared_names, params, &fields));
        callees.extend(body.facts.invocations.iter().map(|i| i.callee.as_str()));
    }
    let method_type_params: Vec<String> =
        class.methods.iter().flat_map(|m| m.type_parameters.iter().cloned()).collect();
    let cbo = coupled_types(
        class.referenced_type_names.iter().map(String::as_str).chain(statics.iter().copied()),
        class,
        &method_type_params,
    )
    .len();

    let access = cohesion_access_sets(class);
    let (tcc, lcc) = tcc_lcc(&access);
    let count_fields = |p: &dyn Fn(&crate::java::FieldModel) -> bool| class.fields.iter().filter(|f| p(f)).count();
    let count_methods = |p: &dyn Fn(&MethodModel) -> bool| class.methods.iter().filter(|m| p(m)).count();

    ClassMetricVector {
        anonymous_classes_qty: sum(&|b| b.tree.count(StatementKind::AnonymousClassBody)),
        assignments_qty: sum(&|b| b.facts.assignments),
        cbo,
        comparisons_qty: sum(&|b| b.facts.comparisons),
        lambdas_qty: sum(&|b| b.tree.count(StatementKind::LambdaBody)),
        lcom: lcom(&access),
        loc: class.code_lines,
        lcc,
        loop_qty: sum(&loops),
        math_operations_qty: sum(&|b| b.facts.math_operations),
        max_nested_blocks: bodies.iter().map(|(b, _)| b.facts.max_nested_blocks).max().unwrap_or(0),
        nosi: statics.len(),
        number_of_abstract_methods: count_methods(&|m| m.modifiers.is_abstract),
        number_of_default_fields: count_fields(&|f| f.visibility == V::Default),
        number_of_default_methods: count_methods(&|m| m.visibility == V::Default),
        number_of_fields: class.fields.len(),
        number_of_final_fields: count_fields(&|f| f.modifiers.is_final),
        number_of_final_methods: count_methods(&|m| m.modifiers.is_final),
        number_of_methods: class.methods.len(),
        number_of_private_fields: count_fields(&|f| f.visibility == V::Private),
        number_of_private_methods: count_methods(&|m| m.visibility == V::Private),
        number_of_protected_fields: count_fields(&|f| f.visibility == V::Protected),
        number_of_protected_methods: count_methods(&|m| m.visibility == V::Protected),
        number_of_public_fields: count_fields(&|f| f.visibility == V::Public),
        number_of_public_methods: count_methods(&|m| m.visibility == V::Public),
        number_of_static_fields: count_fields(&|f| f.modifiers.is_static),
        number_of_static_methods: count_methods(&|m| m.modifiers.is_static),
        number_of_synchronized_fields: count_fields(&|f| f.modifiers.is_synchronized),
        number_of_synchronized_methods: count_methods(&|m| m.modifiers.is_synchronized),
        numbers_qty: sum(&|b| b.facts.numbers),
        parenthesized_exps_qty: sum(&|b| b.facts.parenthesized),
        return_qty: sum(&|b| b.tree.count(StatementKind::Return)),
        rfc: class.methods.len() + callees.len(),
        string_literals_qty: sum(&|b| b.facts.string_literals),
        sub_classes_qty: class.subclass_count,
        try_catch_qty: sum(&try_catch),
        unique_words_qty: class.words.len(),
        variables_qty: sum(&|b| b.facts.variables),
        wmc: class.methods.iter().map(|m| cyclomatic_complexity(&m.body)).sum(),
        tcc,
        is_inner_class: usize::from(class.is_inner),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::java::parse_compilation_unit;

    fn class_of(src: &str) -> ClassModel {
        parse_compilation_unit(src, "T.java").unwrap().classes.remove(0)
    }

    #[test]
    fn names_are_unique_and_complete() {
        let names = feature_names();
        assert_eq!(names.len(), FEATURE_COUNT);
        assert_eq!(names.iter().collect::<BTreeSet<_>>().len(), FEATURE_COUNT);
        assert_eq!(names[40], "isInnerClass");
        assert_eq!(names[41], "method_AnonymousClassesQty");
    }

    #[test]
    fn empty_class_is_all_zero() {
        let v = compute_class_metrics(&class_of("class A {}"));
        let arr = v.to_array();
        // Loc counts the single physical line of the declaration.
        for (name, value) in CLASS_FEATURES.iter().zip(arr) {
            let expected = if *name == "Loc" { 1.0 } else { 0.0 };
            assert_eq!(value, expected, "{name}");
        }
    }

    #[test]
    fn wmc_sums_method_complexity() {
        let c = class_of("class A { void a() {} void b(int x) { if (x > 0 && x < 9) { } } }");
        assert_eq!(compute_class_metrics(&c).wmc, 4);
    }

    #[test]
    fn one_line_method() {
        let c = class_of("class A {\n  int f(){ return 1; }\n}");
        let m = compute_method_metrics(&c.methods[0], &c);
        assert_eq!((m.loc, m.return_qty, m.wmc, m.parameters_qty), (1, 1, 1, 0));
    }

    #[test]
    fn if_else_and_for() {
        let c = class_of("class A { void f(int n) { if (n > 0) { n--; } else { n++; } for (;;) { } } }");
        assert_eq!(compute_method_metrics(&c.methods[0], &c).wmc, 3);
    }

    #[test]
    fn rfc_counts_distinct_callees() {
        let c = class_of("class A { void f() { a(); b(); a(); } }");
        assert_eq!(compute_method_metrics(&c.methods[0], &c).rfc, 2);
        assert_eq!(compute_class_metrics(&c).rfc, 3);
    }

    #[test]
    fn tcc_fixture() {
        let c = class_of("class A { int f, g; void m1() { f++; } void m2() { g = f; } void m3() { } A() { f = g; } }");
        let v = compute_class_metrics(&c);
        assert_eq!((v.tcc, v.lcc), (1.0 / 3.0, 1.0 / 3.0));
        assert_eq!(v.lcom, 1);
    }

    #[test]
    fn coupling_and_static_calls() {
        let c = class_of(
            "class A<T> { List<T> xs; Helper h; void f(Map<String, T> m) { int n = Math.abs(1); h.run(); Util.go(); A a = new A(); } }",
        );
        let v = compute_class_metrics(&c);
        // List, Helper, Map, String, Math, Util
        assert_eq!(v.cbo, 6);
        assert_eq!(v.nosi, 2);
        let m = compute_method_metrics(&c.methods[0], &c);
        assert_eq!(m.cbo, 4);
    }

    #[test]
    fn field_counts_partition() {
        let c = class_of("class A { public int a; private int b; protected int c; int d; static final int E = 1; }");
        let v = compute_class_metrics(&c);
        assert_eq!(v.number_of_fields, 5);
        assert_eq!(
            v.number_of_fields,
            v.number_of_public_fields + v.number_of_private_fields + v.number_of_protected_fields + v.number_of_default_fields
        );
        assert_eq!((v.number_of_static_fields, v.number_of_final_fields), (1, 1));
    }

    #[test]
    fn default_labels_do_not_add_complexity() {
        let c = class_of("class A { int f(int x) { switch (x) { case 1: return 1; case 2: return 2; default: return 0; } } }");
        assert_eq!(compute_method_metrics(&c.methods[0], &c).wmc, 3);
    }
}
