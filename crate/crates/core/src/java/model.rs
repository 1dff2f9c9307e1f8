use std::collections::BTreeSet;
use std::fmt;

/// One parsed `.java` file.
///
/// `classes` is flattened: nested member types appear after their enclosing
/// type, in source order, each with its own methods. Anonymous and local
/// classes are not listed; their code belongs to the enclosing member.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeModel {
    pub path: String,
    pub package: Option<String>,
    pub classes: Vec<ClassModel>,
}

impl CodeModel {
    pub fn class(&self, qualified_name: &str) -> Option<&ClassModel> {
        self.classes.iter().find(|c| c.qualified_name == qualified_name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Visibility {
    Public,
    Private,
    Protected,
    Default,
}

impl fmt::Display for Visibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Visibility::Public => "public",
            Visibility::Private => "private",
            Visibility::Protected => "protected",
            Visibility::Default => "default",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Modifiers {
    pub is_static: bool,
    pub is_final: bool,
    pub is_synchronized: bool,
    pub is_abstract: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TypeKind {
    Class,
    Interface,
    Enum,
    Record,
    Annotation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldModel {
    pub name: String,
    pub type_text: String,
    pub visibility: Visibility,
    pub modifiers: Modifiers,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parameter {
    pub name: String,
    pub type_text: String,
}

/// A call site: `receiver.callee(args)`. `receiver` is the canonical text of
/// the receiver expression, empty for unqualified calls.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct InvocationRecord {
    pub receiver: String,
    pub callee: String,
    pub arg_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start_line: usize,
    pub end_line: usize,
}

/// Syntactic counts gathered while parsing one body of code (a method, an
/// initializer block, or a field initializer), including any lambdas,
/// anonymous classes and local classes nested in it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BodyFacts {
    pub assignments: usize,
    pub comparisons: usize,
    pub math_operations: usize,
    pub numbers: usize,
    pub string_literals: usize,
    pub parenthesized: usize,
    pub variables: usize,
    pub ternaries: usize,
    pub logical_operators: usize,
    pub max_nested_blocks: usize,
    pub invocations: Vec<InvocationRecord>,
    /// Every type name written in the body: declarations, `new`, casts,
    /// `catch`, `instanceof`, generic arguments.
    pub referenced_types: BTreeSet<String>,
    /// Names declared inside the body (locals, lambda and catch parameters).
    pub declared_names: BTreeSet<String>,
    /// Bare identifiers read or written as values.
    pub name_uses: BTreeSet<String>,
    /// Names accessed as `this.name`.
    pub this_uses: BTreeSet<String>,
}

impl BodyFacts {
    pub fn absorb(&mut self, other: &BodyFacts) {
        self.assignments += other.assignments;
        self.comparisons += other.comparisons;
        self.math_operations += other.math_operations;
        self.numbers += other.numbers;
        self.string_literals += other.string_literals;
        self.parenthesized += other.parenthesized;
        self.variables += other.variables;
        self.ternaries += other.ternaries;
        self.logical_operators += other.logical_operators;
        self.max_nested_blocks = self.max_nested_blocks.max(other.max_nested_blocks);
        self.invocations.extend(other.invocations.iter().cloned());
        self.referenced_types.extend(other.referenced_types.iter().cloned());
        self.declared_names.extend(other.declared_names.iter().cloned());
        self.name_uses.extend(other.name_uses.iter().cloned());
        self.this_uses.extend(other.this_uses.iter().cloned());
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StatementKind {
    If,
    ElseBranch,
    For,
    While,
    Do,
    Switch,
    SwitchCase,
    Try,
    Catch,
    Finally,
    Return,
    Throw,
    Break,
    Continue,
    Yield,
    Synchronized,
    Assignment,
    Declaration,
    Expression,
    Block,
    LambdaBody,
    AnonymousClassBody,
    LocalClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statement {
    pub kind: StatementKind,
    pub nesting_depth: usize,
    /// Comment-free, whitespace-normalized text. Compound statements carry
    /// only their header (`if (a > b)`, `catch (E e)`); their bodies are
    /// children.
    pub canonical_text: String,
    pub line: usize,
    pub children: Vec<Statement>,
}

impl Statement {
    pub(crate) fn new(kind: StatementKind, canonical_text: String, line: usize) -> Self {
        Statement { kind, nesting_depth: 0, canonical_text, line, children: Vec::new() }
    }

    pub fn walk<'a>(&'a self, out: &mut Vec<&'a Statement>) {
        out.push(self);
        for child in &self.children {
            child.walk(out);
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StatementTree {
    pub nodes: Vec<Statement>,
}

impl StatementTree {
    pub(crate) fn from_nodes(mut nodes: Vec<Statement>) -> Self {
        fn assign(nodes: &mut [Statement], depth: usize) {
            for node in nodes {
                node.nesting_depth = depth;
                assign(&mut node.children, depth + 1);
            }
        }
        assign(&mut nodes, 0);
        StatementTree { nodes }
    }

    /// Pre-order traversal of every node.
    pub fn iter(&self) -> impl Iterator<Item = &Statement> {
        let mut out = Vec::new();
        for node in &self.nodes {
            node.walk(&mut out);
        }
        out.into_iter()
    }

    pub fn count(&self, kind: StatementKind) -> usize {
        self.iter().filter(|s| s.kind == kind).count()
    }

    pub fn canonical_statements(&self) -> Vec<&str> {
        self.iter().map(|s| s.canonical_text.as_str()).collect()
    }
}

/// A body of code together with the facts gathered from it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Body {
    pub tree: StatementTree,
    pub facts: BodyFacts,
    /// Lines holding at least one token of the declaration.
    pub code_lines: usize,
    /// Distinct identifiers, keywords and number literals inside the braces.
    pub words: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodModel {
    pub name: String,
    /// `name(Type1,Type2)`, parameter types as written with whitespace removed.
    pub signature: String,
    pub visibility: Visibility,
    pub modifiers: Modifiers,
    pub is_constructor: bool,
    pub has_body: bool,
    pub return_type: Option<String>,
    pub type_parameters: Vec<String>,
    pub parameters: Vec<Parameter>,
    pub thrown_types: Vec<String>,
    pub body: Body,
    pub accessed_field_names: BTreeSet<String>,
    pub source_span: SourceSpan,
    pub raw_body_text: String,
}

impl MethodModel {
    pub fn invocations(&self) -> &[InvocationRecord] {
        &self.body.facts.invocations
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassModel {
    pub qualified_name: String,
    pub simple_name: String,
    pub kind: TypeKind,
    pub is_inner: bool,
    pub visibility: Visibility,
    pub modifiers: Modifiers,
    pub type_parameters: Vec<String>,
    pub supertypes: Vec<String>,
    pub fields: Vec<FieldModel>,
    pub methods: Vec<MethodModel>,
    /// Initializer blocks, field initializers and enum-constant bodies.
    pub initializers: Vec<Body>,
    /// Member types declared directly in this type's body.
    pub subclass_count: usize,
    /// Every type name referenced anywhere in the class's own code, member
    /// types excluded.
    pub referenced_type_names: BTreeSet<String>,
    pub source_span: SourceSpan,
    /// Physical code lines of the whole declaration, member types included.
    pub code_lines: usize,
    /// Distinct words inside the class body braces, member types excluded.
    pub words: BTreeSet<String>,
}

impl ClassModel {
    pub fn method(&self, signature: &str) -> Option<&MethodModel> {
        self.methods.iter().find(|m| m.signature == signature)
    }

    pub fn field_names(&self) -> BTreeSet<&str> {
        self.fields.iter().map(|f| f.name.as_str()).collect()
    }
}
