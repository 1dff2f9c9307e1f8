//! Recursive-descent parser for the supported Java subset.
//!
//! The parser does no symbol resolution. Each method, initializer block and
//! field initializer is parsed inside its own fact context ([`BodyFacts`]);
//! lambdas, anonymous classes and local classes are parsed inline so that
//! their code counts toward the member that contains them.

use std::collections::BTreeSet;

use super::canonical::join_tokens;
use super::lexer::{is_keyword, is_primitive, Token, TokenKind};
use super::model::*;
use super::ParseError;

type PResult<T> = Result<T, ParseError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ExprKind {
    Assign,
    Other,
}

#[derive(Debug, Default, Clone)]
struct Mods {
    visibility: Option<Visibility>,
    modifiers: Modifiers,
    default_kw: bool,
    /// First non-annotation token of the declaration.
    first: Option<usize>,
}

/// A type as written: compact text plus every class-type name inside it.
#[derive(Debug, Clone)]
struct TypeRef {
    text: String,
    names: Vec<String>,
}

struct Context {
    facts: BodyFacts,
    depth: usize,
}

#[derive(Default)]
struct ClassParts {
    fields: Vec<FieldModel>,
    methods: Vec<MethodModel>,
    initializers: Vec<Body>,
    nested: Vec<ClassModel>,
    member_types: usize,
    nested_ranges: Vec<(usize, usize)>,
    own_types: BTreeSet<String>,
    /// Only filled for inline (anonymous/local) class bodies.
    inline_nodes: Vec<Statement>,
}

struct Header<'h> {
    simple_name: &'h str,
    kind: TypeKind,
    qualified_name: &'h str,
}

pub(crate) struct Parser<'a> {
    src: &'a str,
    toks: &'a [Token],
    pos: usize,
    ctx: Vec<Context>,
    pending: Vec<Statement>,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(src: &'a str, toks: &'a [Token]) -> Self {
        Parser { src, toks, pos: 0, ctx: vec![Context { facts: BodyFacts::default(), depth: 0 }], pending: Vec::new() }
    }

    // ----------------------------------------------------------------------
    // token helpers

    fn tok(&self, i: usize) -> Option<&'a Token> {
        self.toks.get(i)
    }

    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn at(&self, text: &str) -> bool {
        self.peek().is_some_and(|t| t.is(text))
    }

    fn at_n(&self, n: usize, text: &str) -> bool {
        self.tok(self.pos + n).is_some_and(|t| t.is(text))
    }

    fn eat(&mut self, text: &str) -> bool {
        if self.at(text) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, text: &str) -> PResult<&'a Token> {
        if self.at(text) {
            self.pos += 1;
            Ok(&self.toks[self.pos - 1])
        } else {
            Err(self.error(&format!("expected `{text}`")))
        }
    }

    fn error(&self, message: &str) -> ParseError {
        let (line, col, found) = match self.peek() {
            Some(t) => (t.line, t.col, format!("`{}`", t.text)),
            None => match self.toks.last() {
                Some(t) => (t.end_line, t.col + t.text.chars().count(), "end of file".to_string()),
                None => (1, 1, "end of file".to_string()),
            },
        };
        ParseError::Syntax { line, col, message: format!("{message}, found {found}") }
    }

    fn ident(&mut self) -> PResult<&'a Token> {
        match self.peek() {
            Some(t) if t.is_ident() => {
                self.pos += 1;
                Ok(t)
            }
            _ => Err(self.error("expected identifier")),
        }
    }

    fn is_ident_at(&self, i: usize) -> bool {
        self.tok(i).is_some_and(|t| t.is_ident())
    }

    fn adjacent(&self, i: usize) -> bool {
        match (self.tok(i), self.tok(i + 1)) {
            (Some(a), Some(b)) => a.end == b.start,
            _ => false,
        }
    }

    fn text(&self, from: usize, to: usize) -> String {
        join_tokens(&self.toks[from..to])
    }

    fn compact(&self, from: usize, to: usize) -> String {
        self.toks[from..to].iter().map(|t| t.text.as_str()).collect()
    }

    fn line(&self) -> usize {
        self.peek().map_or_else(|| self.toks.last().map_or(1, |t| t.end_line), |t| t.line)
    }

    fn fx(&mut self) -> &mut BodyFacts {
        &mut self.ctx.last_mut().expect("context stack is never empty").facts
    }

    fn push_ctx(&mut self, inherit_depth: bool) {
        let depth = if inherit_depth { self.ctx.last().map_or(0, |c| c.depth) } else { 0 };
        self.ctx.push(Context { facts: BodyFacts::default(), depth });
    }

    fn pop_ctx(&mut self) -> BodyFacts {
        self.ctx.pop().expect("unbalanced context").facts
    }

    fn enter_block(&mut self) {
        let ctx = self.ctx.last_mut().expect("context stack is never empty");
        ctx.depth += 1;
        ctx.facts.max_nested_blocks = ctx.facts.max_nested_blocks.max(ctx.depth);
    }

    fn exit_block(&mut self) {
        let ctx = self.ctx.last_mut().expect("context stack is never empty");
        ctx.depth = ctx.depth.saturating_sub(1);
    }

    fn take_pending(&mut self) -> Vec<Statement> {
        std::mem::take(&mut self.pending)
    }

    fn code_lines(&self, from: usize, to: usize) -> usize {
        let mut lines = BTreeSet::new();
        for t in &self.toks[from..=to] {
            lines.extend(t.line..=t.end_line);
        }
        lines.len()
    }

    fn words(&self, from: usize, to: usize, skip: &[(usize, usize)]) -> BTreeSet<String> {
        (from..=to)
            .filter(|i| !skip.iter().any(|&(a, b)| (a..=b).contains(i)))
            .map(|i| &self.toks[i])
            .filter(|t| t.is_word())
            .map(|t| t.text.clone())
            .collect()
    }

    // ----------------------------------------------------------------------
    // compilation unit

    pub(crate) fn parse_unit(&mut self) -> PResult<(Option<String>, Vec<ClassModel>)> {
        let mut package = None;
        let save = self.pos;
        self.skip_annotations()?;
        if self.eat("package") {
            let start = self.pos;
            while !self.at(";") {
                if self.peek().is_none() {
                    return Err(self.error("expected `;`"));
                }
                self.pos += 1;
            }
            package = Some(self.compact(start, self.pos));
            self.pos += 1;
        } else {
            self.pos = save;
        }
        while self.at("import") {
            while !self.eat(";") {
                if self.peek().is_none() {
                    return Err(self.error("expected `;`"));
                }
                self.pos += 1;
            }
        }

        let mut classes = Vec::new();
        let mut top_names = BTreeSet::new();
        while self.peek().is_some() {
            if self.eat(";") {
                continue;
            }
            let mods = self.parse_modifiers()?;
            if !self.at_type_keyword() {
                return Err(self.error("expected a type declaration"));
            }
            let decl = self.parse_type_declaration(mods, package.as_deref(), false)?;
            if !top_names.insert(decl[0].simple_name.clone()) {
                return Err(self.error(&format!("duplicate type `{}`", decl[0].simple_name)));
            }
            classes.extend(decl);
        }
        Ok((package, classes))
    }

    fn skip_annotations(&mut self) -> PResult<()> {
        while self.at("@") && !self.at_n(1, "interface") {
            self.pos += 1;
            self.ident()?;
            while self.at(".") && self.is_ident_at(self.pos + 1) {
                self.pos += 2;
            }
            if self.at("(") {
                self.skip_balanced("(", ")")?;
            }
        }
        Ok(())
    }

    fn skip_balanced(&mut self, open: &str, close: &str) -> PResult<()> {
        self.expect(open)?;
        let mut depth = 1;
        while depth > 0 {
            let Some(t) = self.peek() else {
                return Err(self.error(&format!("expected `{close}`")));
            };
            if t.is(open) {
                depth += 1;
            } else if t.is(close) {
                depth -= 1;
            }
            self.pos += 1;
        }
        Ok(())
    }

    fn parse_modifiers(&mut self) -> PResult<Mods> {
        let mut mods = Mods::default();
        loop {
            self.skip_annotations()?;
            let Some(t) = self.peek() else { break };
            let start = self.pos;
            match t.text.as_str() {
                _ if t.kind != TokenKind::Ident => break,
                "public" => mods.visibility = Some(Visibility::Public),
                "private" => mods.visibility = Some(Visibility::Private),
                "protected" => mods.visibility = Some(Visibility::Protected),
                "static" => mods.modifiers.is_static = true,
                "final" => mods.modifiers.is_final = true,
                "synchronized" if !self.at_n(1, "(") => mods.modifiers.is_synchronized = true,
                "abstract" => mods.modifiers.is_abstract = true,
                "default" if !self.at_n(1, ":") && !self.at_n(1, "->") => mods.default_kw = true,
                "native" | "transient" | "volatile" | "strictfp" => {}
                "sealed" if self.is_ident_at(self.pos + 1) || self.at_n(1, "class") || self.at_n(1, "interface") => {}
                "non" if self.at_n(1, "-") && self.at_n(2, "sealed") => self.pos += 2,
                _ => break,
            }
            self.pos += 1;
            mods.first.get_or_insert(start);
        }
        Ok(mods)
    }

    fn at_type_keyword(&self) -> bool {
        self.at("class")
            || self.at("interface")
            || self.at("enum")
            || (self.at("@") && self.at_n(1, "interface"))
            || (self.at("record") && self.is_ident_at(self.pos + 1) && (self.at_n(2, "(") || self.at_n(2, "<")))
    }

    fn parse_type_declaration(&mut self, mods: Mods, outer: Option<&str>, is_inner: bool) -> PResult<Vec<ClassModel>> {
        let decl_start = mods.first.unwrap_or(self.pos);
        let kind = if self.eat("class") {
            TypeKind::Class
        } else if self.eat("interface") {
            TypeKind::Interface
        } else if self.eat("enum") {
            TypeKind::Enum
        } else if self.eat("record") {
            TypeKind::Record
        } else {
            self.expect("@")?;
            self.expect("interface")?;
            TypeKind::Annotation
        };
        let name_tok = self.ident()?;
        let simple_name = name_tok.text.clone();
        let qualified_name = match outer {
            Some(o) if !o.is_empty() => format!("{o}.{simple_name}"),
            _ => simple_name.clone(),
        };
        let (type_parameters, bounds) = if self.at("<") { self.parse_type_parameters()? } else { Default::default() };

        let mut parts = ClassParts::default();
        parts.own_types.extend(bounds);
        if kind == TypeKind::Record {
            self.expect("(")?;
            while !self.at(")") {
                self.skip_annotations()?;
                let line = self.line();
                let ty = self.parse_type()?;
                self.eat("...");
                let name = self.ident()?.text.clone();
                parts.own_types.extend(ty.names.iter().cloned());
                parts.fields.push(FieldModel {
                    name,
                    type_text: ty.text,
                    visibility: Visibility::Private,
                    modifiers: Modifiers { is_final: true, ..Modifiers::default() },
                    line,
                });
                if !self.eat(",") {
                    break;
                }
            }
            self.expect(")")?;
        }

        let mut supertypes = Vec::new();
        loop {
            if self.eat("extends") || self.eat("implements") {
                loop {
                    let ty = self.parse_type()?;
                    supertypes.push(ty.text.clone());
                    parts.own_types.extend(ty.names);
                    if !self.eat(",") {
                        break;
                    }
                }
            } else if self.at("permits") {
                self.pos += 1;
                loop {
                    self.parse_type()?;
                    if !self.eat(",") {
                        break;
                    }
                }
            } else {
                break;
            }
        }

        let header = Header { simple_name: &simple_name, kind, qualified_name: &qualified_name };
        let body_start = self.pos;
        self.parse_class_body(&header, false, &mut parts)?;
        let end = self.pos - 1;

        let start_line = self.toks[decl_start].line;
        let end_line = self.toks[end].end_line;
        let code_lines = self.code_lines(decl_start, end);
        let words = self.words(body_start, end, &parts.nested_ranges);

        let field_names: BTreeSet<String> = parts.fields.iter().map(|f| f.name.clone()).collect();
        for method in &mut parts.methods {
            let params: BTreeSet<&str> = method.parameters.iter().map(|p| p.name.as_str()).collect();
            let facts = &method.body.facts;
            let bare = facts
                .name_uses
                .iter()
                .filter(|n| !facts.declared_names.contains(*n) && !params.contains(n.as_str()));
            method.accessed_field_names = bare
                .chain(facts.this_uses.iter())
                .filter(|n| field_names.contains(*n))
                .cloned()
                .collect();
        }

        let mut referenced = parts.own_types.clone();
        for m in &parts.methods {
            referenced.extend(m.body.facts.referenced_types.iter().cloned());
        }
        for b in &parts.initializers {
            referenced.extend(b.facts.referenced_types.iter().cloned());
        }

        let class = ClassModel {
            qualified_name: qualified_name.clone(),
            simple_name,
            kind,
            is_inner,
            visibility: mods.visibility.unwrap_or(Visibility::Default),
            modifiers: mods.modifiers,
            type_parameters,
            supertypes,
            fields: parts.fields,
            methods: parts.methods,
            initializers: parts.initializers,
            subclass_count: parts.member_types,
            referenced_type_names: referenced,
            source_span: SourceSpan { start_line, end_line },
            code_lines,
            words,
        };
        let mut out = vec![class];
        out.extend(parts.nested);
        Ok(out)
    }

    /// Returns the declared names and every type name used in their bounds.
    fn parse_type_parameters(&mut self) -> PResult<(Vec<String>, Vec<String>)> {
        self.expect("<")?;
        let mut names = Vec::new();
        let mut bounds = Vec::new();
        loop {
            self.skip_annotations()?;
            names.push(self.ident()?.text.clone());
            if self.eat("extends") {
                loop {
                    bounds.extend(self.parse_type()?.names);
                    if !self.eat("&") {
                        break;
                    }
                }
            }
            if !self.eat(",") {
                break;
            }
        }
        self.expect(">")?;
        bounds.retain(|b| !names.contains(b));
        Ok((names, bounds))
    }

    /// Parses `{ members }`. With `inline` set (anonymous and local classes)
    /// every member is also turned into statement nodes and its facts are
    /// merged into the enclosing context.
    fn parse_class_body(&mut self, header: &Header<'_>, inline: bool, parts: &mut ClassParts) -> PResult<()> {
        self.expect("{")?;
        if inline {
            self.enter_block();
        }
        let interface_like = matches!(header.kind, TypeKind::Interface | TypeKind::Annotation);

        if header.kind == TypeKind::Enum {
            self.parse_enum_constants(inline, parts)?;
        }

        let mut member_names = BTreeSet::new();
        while !self.at("}") {
            if self.peek().is_none() {
                return Err(self.error("expected `}`"));
            }
            if self.eat(";") {
                continue;
            }
            let member_start = self.pos;
            let mut mods = self.parse_modifiers()?;
            if interface_like && mods.visibility.is_none() {
                mods.visibility = Some(Visibility::Public);
            }

            if self.at_type_keyword() {
                let start = mods.first.unwrap_or(self.pos);
                if inline {
                    let node = self.parse_local_class(mods)?;
                    parts.inline_nodes.push(node);
                } else {
                    let nested = self.parse_type_declaration(mods, Some(header.qualified_name), true)?;
                    if !member_names.insert(nested[0].simple_name.clone()) {
                        return Err(self.error(&format!("duplicate member type `{}`", nested[0].simple_name)));
                    }
                    parts.member_types += 1;
                    parts.nested_ranges.push((start, self.pos - 1));
                    parts.nested.extend(nested);
                }
                continue;
            }

            if self.at("{") {
                let line = self.line();
                self.push_ctx(inline);
                let nodes = if inline { self.parse_nested_block()? } else { self.parse_block_contents()? };
                let facts = self.pop_ctx();
                if inline {
                    let mut node = Statement::new(StatementKind::Block, if mods.modifiers.is_static { "static".into() } else { "{".into() }, line);
                    node.children = nodes;
                    parts.inline_nodes.push(node);
                    self.fx().absorb(&facts);
                } else {
                    let tree = StatementTree::from_nodes(nodes);
                    let last = self.pos - 1;
                    let body = Body {
                        tree,
                        facts,
                        code_lines: self.code_lines(member_start, last),
                        words: self.words(member_start, last, &[]),
                    };
                    parts.initializers.push(body);
                }
                continue;
            }

            let (type_parameters, bounds) = if self.at("<") { self.parse_type_parameters()? } else { Default::default() };
            let decl_start = mods.first.unwrap_or_else(|| self.first_non_annotation(member_start));

            let is_ctor = self.peek().is_some_and(|t| t.text == header.simple_name) && self.at_n(1, "(");
            let is_compact_ctor = header.kind == TypeKind::Record
                && self.peek().is_some_and(|t| t.text == header.simple_name)
                && self.at_n(1, "{");
            if is_ctor || is_compact_ctor {
                let name = self.ident()?.text.clone();
                let mut method = self.parse_method_rest(mods, type_parameters, None, name, decl_start, true, header.kind, inline)?;
                method.body.facts.referenced_types.extend(bounds);
                self.add_method(method, inline, parts);
                continue;
            }

            let ty = self.parse_type()?;
            let name_tok = self.ident()?;
            if self.at("(") {
                let mut method =
                    self.parse_method_rest(mods, type_parameters, Some(ty), name_tok.text.clone(), decl_start, false, header.kind, inline)?;
                method.body.facts.referenced_types.extend(bounds);
                self.add_method(method, inline, parts);
            } else {
                self.pos -= 1;
                self.parse_field_declaration(mods, ty, interface_like, decl_start, inline, parts)?;
            }
        }
        self.expect("}")?;
        if inline {
            self.exit_block();
        }
        Ok(())
    }

    fn first_non_annotation(&self, from: usize) -> usize {
        let mut i = from;
        while self.tok(i).is_some_and(|t| t.is("@")) && !self.tok(i + 1).is_some_and(|t| t.is("interface")) {
            i += 2;
            while self.tok(i).is_some_and(|t| t.is(".")) {
                i += 2;
            }
            if self.tok(i).is_some_and(|t| t.is("(")) {
                let mut depth = 0usize;
                while let Some(t) = self.tok(i) {
                    if t.is("(") {
                        depth += 1;
                    } else if t.is(")") {
                        depth -= 1;
                        if depth == 0 {
                            i += 1;
                            break;
                        }
                    }
                    i += 1;
                }
            }
        }
        i
    }

    fn add_method(&mut self, method: MethodModel, inline: bool, parts: &mut ClassParts) {
        if inline {
            let mut node = Statement::new(StatementKind::Block, self.method_header_text(&method), method.source_span.start_line);
            node.children = method.body.tree.nodes.clone();
            parts.inline_nodes.push(node);
            self.fx().absorb(&method.body.facts);
            let params: Vec<String> = method.parameters.iter().map(|p| p.name.clone()).collect();
            self.fx().declared_names.extend(params);
        } else {
            parts.methods.push(method);
        }
    }

    fn method_header_text(&self, method: &MethodModel) -> String {
        let mut text = String::new();
        if let Some(rt) = &method.return_type {
            text.push_str(rt);
            text.push(' ');
        }
        text.push_str(&method.signature);
        text
    }

    fn parse_enum_constants(&mut self, inline: bool, parts: &mut ClassParts) -> PResult<()> {
        loop {
            self.skip_annotations()?;
            if self.eat(";") || self.at("}") {
                break;
            }
            let start = self.pos;
            let name = self.ident()?;
            let line = name.line;
            self.push_ctx(inline);
            let saved = self.take_pending();
            if self.at("(") {
                self.parse_arguments()?;
            }
            if self.at("{") {
                let node = self.parse_anonymous_body(line)?;
                self.pending.push(node);
            }
            let nested = std::mem::replace(&mut self.pending, saved);
            let facts = self.pop_ctx();
            let end = self.pos - 1;
            let mut node = Statement::new(StatementKind::Expression, self.text(start, self.pos), line);
            node.children = nested;
            if inline {
                self.fx().absorb(&facts);
                parts.inline_nodes.push(node);
            } else if end > start {
                parts.initializers.push(Body {
                    tree: StatementTree::from_nodes(vec![node]),
                    facts,
                    code_lines: self.code_lines(start, end),
                    words: self.words(start, end, &[]),
                });
            }
            if !self.eat(",") {
                self.eat(";");
                break;
            }
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn parse_method_rest(
        &mut self,
        mut mods: Mods,
        type_parameters: Vec<String>,
        return_type: Option<TypeRef>,
        name: String,
        decl_start: usize,
        is_constructor: bool,
        owner: TypeKind,
        inline: bool,
    ) -> PResult<MethodModel> {
        self.push_ctx(inline);
        let mut parameters = Vec::new();
        if self.eat("(") {
            while !self.at(")") {
                self.skip_param_modifiers()?;
                let ty = self.parse_type()?;
                let varargs = self.eat("...");
                let pname = if self.eat("this") { "this".to_string() } else { self.ident()?.text.clone() };
                let mut type_text = ty.text;
                while self.at("[") && self.at_n(1, "]") {
                    self.pos += 2;
                    type_text.push_str("[]");
                }
                if varargs {
                    type_text.push_str("...");
                }
                self.fx().referenced_types.extend(ty.names);
                if pname != "this" {
                    parameters.push(Parameter { name: pname, type_text });
                }
                if !self.eat(",") {
                    break;
                }
            }
            self.expect(")")?;
        }
        let mut return_text = return_type.as_ref().map(|t| t.text.clone());
        while self.at("[") && self.at_n(1, "]") {
            self.pos += 2;
            if let Some(t) = return_text.as_mut() {
                t.push_str("[]");
            }
        }
        if let Some(rt) = return_type {
            self.fx().referenced_types.extend(rt.names);
        }
        let mut thrown_types = Vec::new();
        if self.eat("throws") {
            loop {
                let ty = self.parse_type()?;
                thrown_types.push(ty.text.clone());
                self.fx().referenced_types.extend(ty.names);
                if !self.eat(",") {
                    break;
                }
            }
        }

        let body_start = self.pos;
        let (nodes, has_body) = if self.at("{") {
            let nodes = if inline { self.parse_nested_block()? } else { self.parse_block_contents()? };
            (nodes, true)
        } else {
            if self.eat("default") {
                self.parse_element_value()?;
            }
            self.expect(";")?;
            (Vec::new(), false)
        };
        let end = self.pos - 1;
        let facts = self.pop_ctx();

        let interface_like = matches!(owner, TypeKind::Interface | TypeKind::Annotation);
        if interface_like && !has_body && !mods.modifiers.is_static && !mods.default_kw {
            mods.modifiers.is_abstract = true;
        }

        let signature = format!(
            "{}({})",
            name,
            parameters.iter().map(|p| p.type_text.as_str()).collect::<Vec<_>>().join(",")
        );
        let start_tok = &self.toks[decl_start];
        let end_tok = &self.toks[end];
        Ok(MethodModel {
            name,
            signature,
            visibility: mods.visibility.unwrap_or(Visibility::Default),
            modifiers: mods.modifiers,
            is_constructor,
            has_body,
            return_type: return_text,
            type_parameters,
            parameters,
            thrown_types,
            body: Body {
                tree: StatementTree::from_nodes(nodes),
                facts,
                code_lines: self.code_lines(decl_start, end),
                words: if has_body { self.words(body_start, end, &[]) } else { BTreeSet::new() },
            },
            accessed_field_names: BTreeSet::new(),
            source_span: SourceSpan { start_line: start_tok.line, end_line: end_tok.end_line },
            raw_body_text: self.src[start_tok.start..end_tok.end].to_string(),
        })
    }

    fn parse_element_value(&mut self) -> PResult<()> {
        if self.at("{") {
            self.skip_balanced("{", "}")
        } else if self.at("@") {
            self.skip_annotations()
        } else {
            self.parse_ternary()
        }
    }

    fn skip_param_modifiers(&mut self) -> PResult<()> {
        loop {
            self.skip_annotations()?;
            if !self.eat("final") {
                return Ok(());
            }
        }
    }

    fn parse_field_declaration(
        &mut self,
        mods: Mods,
        ty: TypeRef,
        interface_like: bool,
        decl_start: usize,
        inline: bool,
        parts: &mut ClassParts,
    ) -> PResult<()> {
        let mut modifiers = mods.modifiers;
        if interface_like {
            modifiers.is_static = true;
            modifiers.is_final = true;
        }
        let visibility = mods.visibility.unwrap_or(Visibility::Default);
        parts.own_types.extend(ty.names.iter().cloned());

        self.push_ctx(inline);
        let saved = self.take_pending();
        let mut any_init = false;
        loop {
            let name_tok = self.ident()?;
            let mut type_text = ty.text.clone();
            while self.at("[") && self.at_n(1, "]") {
                self.pos += 2;
                type_text.push_str("[]");
            }
            if self.eat("=") {
                any_init = true;
                self.parse_variable_initializer()?;
            }
            parts.fields.push(FieldModel {
                name: name_tok.text.clone(),
                type_text,
                visibility,
                modifiers,
                line: name_tok.line,
            });
            if !self.eat(",") {
                break;
            }
        }
        self.expect(";")?;
        let end = self.pos - 1;
        let nested = std::mem::replace(&mut self.pending, saved);
        let facts = self.pop_ctx();
        let mut node = Statement::new(StatementKind::Declaration, self.text(decl_start, self.pos), self.toks[decl_start].line);
        node.children = nested;
        if inline {
            self.fx().absorb(&facts);
            self.fx().referenced_types.extend(ty.names);
            parts.inline_nodes.push(node);
        } else if any_init {
            parts.initializers.push(Body {
                tree: StatementTree::from_nodes(vec![node]),
                facts,
                code_lines: self.code_lines(decl_start, end),
                words: self.words(decl_start, end, &[]),
            });
        }
        Ok(())
    }

    // ----------------------------------------------------------------------
    // types

    /// Scans a type starting at `i` without consuming anything.
    fn scan_type(&self, mut i: usize) -> Option<(usize, TypeRef)> {
        let start;
        let mut names = Vec::new();
        // Leading type annotations.
        while self.tok(i)?.is("@") {
            i += 2;
        }
        start = i;
        let t = self.tok(i)?;
        if t.kind != TokenKind::Ident {
            return None;
        }
        if is_primitive(&t.text) {
            i += 1;
        } else {
            if is_keyword(&t.text) {
                return None;
            }
            let mut name = t.text.clone();
            i += 1;
            loop {
                if self.tok(i).is_some_and(|t| t.is("<")) {
                    i = self.scan_type_args(i, &mut names)?;
                }
                if self.tok(i).is_some_and(|t| t.is(".")) && self.tok(i + 1).is_some_and(|t| t.is_ident()) {
                    name.push('.');
                    name.push_str(&self.toks[i + 1].text);
                    i += 2;
                } else {
                    break;
                }
            }
            names.insert(0, name);
        }
        while self.tok(i).is_some_and(|t| t.is("[")) && self.tok(i + 1).is_some_and(|t| t.is("]")) {
            i += 2;
        }
        let text = self.compact(start, i);
        Some((i, TypeRef { text, names }))
    }

    fn scan_type_args(&self, mut i: usize, names: &mut Vec<String>) -> Option<usize> {
        i += 1; // `<`
        if self.tok(i)?.is(">") {
            return Some(i + 1);
        }
        loop {
            while self.tok(i)?.is("@") {
                i += 2;
            }
            if self.tok(i)?.is("?") {
                i += 1;
                if self.tok(i)?.is("extends") || self.tok(i)?.is("super") {
                    let (end, ty) = self.scan_type(i + 1)?;
                    names.extend(ty.names);
                    i = end;
                }
            } else {
                let (end, ty) = self.scan_type(i)?;
                names.extend(ty.names);
                i = end;
            }
            if self.tok(i)?.is(",") {
                i += 1;
                continue;
            }
            if self.tok(i)?.is(">") {
                return Some(i + 1);
            }
            return None;
        }
    }

    fn parse_type(&mut self) -> PResult<TypeRef> {
        match self.scan_type(self.pos) {
            Some((end, ty)) => {
                self.pos = end;
                Ok(ty)
            }
            None => Err(self.error("expected a type")),
        }
    }

    fn record_types(&mut self, ty: &TypeRef) {
        let names = ty.names.iter().filter(|n| n.as_str() != "var").cloned().collect::<Vec<_>>();
        self.fx().referenced_types.extend(names);
    }

    // ----------------------------------------------------------------------
    // statements

    /// Parses `{ ... }` and returns its statements. Does not count as a
    /// nested block; callers that open a real nested block use
    /// [`Self::parse_nested_block`].
    fn parse_block_contents(&mut self) -> PResult<Vec<Statement>> {
        self.expect("{")?;
        let mut nodes = Vec::new();
        while !self.at("}") {
            if self.peek().is_none() {
                return Err(self.error("expected `}`"));
            }
            nodes.extend(self.parse_statement()?);
        }
        self.pos += 1;
        Ok(nodes)
    }

    fn parse_nested_block(&mut self) -> PResult<Vec<Statement>> {
        self.enter_block();
        let nodes = self.parse_block_contents();
        self.exit_block();
        nodes
    }

    /// Body of a control statement: a braced block is flattened into its
    /// statements.
    fn parse_substatement(&mut self) -> PResult<Vec<Statement>> {
        if self.at("{") {
            self.parse_nested_block()
        } else {
            self.parse_statement()
        }
    }

    fn leaf(&mut self, kind: StatementKind, start: usize, line: usize) -> Statement {
        let mut node = Statement::new(kind, self.text(start, self.pos), line);
        node.children = self.take_pending();
        node
    }

    fn parse_statement(&mut self) -> PResult<Vec<Statement>> {
        let saved = self.take_pending();
        let result = self.parse_statement_inner();
        self.pending = saved;
        result
    }

    fn parse_statement_inner(&mut self) -> PResult<Vec<Statement>> {
        let start = self.pos;
        let line = self.line();
        let Some(t) = self.peek() else {
            return Err(self.error("expected a statement"));
        };
        use StatementKind as K;

        if t.kind == TokenKind::Ident {
            match t.text.as_str() {
                "if" => return self.parse_if(),
                "for" => return self.parse_for().map(|s| vec![s]),
                "while" => {
                    self.pos += 1;
                    self.parse_paren_expr()?;
                    let mut node = self.leaf(K::While, start, line);
                    node.children.extend(self.parse_substatement()?);
                    return Ok(vec![node]);
                }
                "do" => {
                    self.pos += 1;
                    let body = self.parse_substatement()?;
                    let tail = self.pos;
                    self.expect("while")?;
                    self.parse_paren_expr()?;
                    self.expect(";")?;
                    let mut node = Statement::new(K::Do, format!("do {}", self.text(tail, self.pos)), line);
                    node.children = body;
                    node.children.extend(self.take_pending());
                    return Ok(vec![node]);
                }
                "switch" => {
                    let node = self.parse_switch()?;
                    self.eat(";");
                    return Ok(vec![node]);
                }
                "try" => return self.parse_try(),
                "return" => {
                    self.pos += 1;
                    if !self.at(";") {
                        self.parse_expr()?;
                    }
                    self.expect(";")?;
                    return Ok(vec![self.leaf(K::Return, start, line)]);
                }
                "throw" => {
                    self.pos += 1;
                    self.parse_expr()?;
                    self.expect(";")?;
                    return Ok(vec![self.leaf(K::Throw, start, line)]);
                }
                "break" | "continue" => {
                    let kind = if t.text == "break" { K::Break } else { K::Continue };
                    self.pos += 1;
                    if self.is_ident_at(self.pos) {
                        self.pos += 1;
                    }
                    self.expect(";")?;
                    return Ok(vec![self.leaf(kind, start, line)]);
                }
                "yield" if !self.next_continues_expression(1) => {
                    self.pos += 1;
                    self.parse_expr()?;
                    self.expect(";")?;
                    return Ok(vec![self.leaf(K::Yield, start, line)]);
                }
                "synchronized" => {
                    self.pos += 1;
                    self.parse_paren_expr()?;
                    let mut node = self.leaf(K::Synchronized, start, line);
                    node.children.extend(self.parse_nested_block()?);
                    return Ok(vec![node]);
                }
                "assert" => {
                    self.pos += 1;
                    self.parse_expr()?;
                    if self.eat(":") {
                        self.parse_expr()?;
                    }
                    self.expect(";")?;
                    return Ok(vec![self.leaf(K::Expression, start, line)]);
                }
                "else" => return Err(self.error("`else` without `if`")),
                "case" | "default" if self.at_n(1, ":") || t.text == "case" => {
                    return Err(self.error("unexpected switch label"));
                }
                _ => {}
            }
            if t.is_ident() && self.at_n(1, ":") {
                self.pos += 2;
                let mut nodes = self.parse_statement()?;
                if let Some(first) = nodes.first_mut() {
                    first.canonical_text = format!("{}: {}", t.text, first.canonical_text);
                }
                return Ok(nodes);
            }
        }
        if self.at("{") {
            let children = self.parse_nested_block()?;
            let mut node = Statement::new(K::Block, "{".to_string(), line);
            node.children = children;
            return Ok(vec![node]);
        }
        if self.eat(";") {
            return Ok(Vec::new());
        }

        // Local class or local declaration.
        let save = self.pos;
        let mods = self.parse_modifiers()?;
        if self.at_type_keyword() {
            return Ok(vec![self.parse_local_class(mods)?]);
        }
        if let Some((end, ty)) = self.scan_local_decl_type() {
            self.pos = end;
            self.record_types(&ty);
            self.parse_declarators()?;
            self.expect(";")?;
            return Ok(vec![self.leaf(K::Declaration, start, line)]);
        }
        self.pos = save;

        let kind = self.parse_expr()?;
        self.expect(";")?;
        let kind = if kind == ExprKind::Assign { K::Assignment } else { K::Expression };
        Ok(vec![self.leaf(kind, start, line)])
    }

    /// True when the token `n` ahead makes the current identifier part of an
    /// expression rather than a contextual keyword.
    fn next_continues_expression(&self, n: usize) -> bool {
        match self.tok(self.pos + n) {
            None => true,
            Some(t) => {
                t.kind == TokenKind::Op
                    && matches!(
                        t.text.as_str(),
                        "=" | "(" | "." | "[" | "++" | "--" | ";" | "+=" | "-=" | "*=" | "/=" | ")" | "," | "::"
                    )
            }
        }
    }

    /// `[final|@A]* Type name` followed by `=`, `;`, `,`, `[` or `:`.
    fn scan_local_decl_type(&self) -> Option<(usize, TypeRef)> {
        let (end, ty) = self.scan_type(self.pos)?;
        let name = self.tok(end)?;
        if !name.is_ident() {
            return None;
        }
        let follow = self.tok(end + 1)?;
        if ["=", ";", ",", "[", ":"].iter().any(|s| follow.is(s)) {
            Some((end, ty))
        } else {
            None
        }
    }

    fn parse_declarators(&mut self) -> PResult<()> {
        loop {
            let name = self.ident()?.text.clone();
            while self.at("[") && self.at_n(1, "]") {
                self.pos += 2;
            }
            self.fx().variables += 1;
            self.fx().declared_names.insert(name);
            if self.eat("=") {
                self.parse_variable_initializer()?;
            }
            if !self.eat(",") {
                return Ok(());
            }
        }
    }

    fn parse_variable_initializer(&mut self) -> PResult<()> {
        if self.at("{") {
            self.parse_array_initializer()
        } else {
            self.parse_expr().map(|_| ())
        }
    }

    fn parse_array_initializer(&mut self) -> PResult<()> {
        self.expect("{")?;
        while !self.at("}") {
            self.parse_variable_initializer()?;
            if !self.eat(",") {
                break;
            }
        }
        self.expect("}")?;
        Ok(())
    }

    fn parse_paren_expr(&mut self) -> PResult<()> {
        self.expect("(")?;
        self.parse_expr()?;
        self.expect(")")?;
        Ok(())
    }

    fn parse_if(&mut self) -> PResult<Vec<Statement>> {
        let start = self.pos;
        let line = self.line();
        self.expect("if")?;
        self.parse_paren_expr()?;
        let mut node = self.leaf(StatementKind::If, start, line);
        node.children.extend(self.parse_substatement()?);
        let mut out = vec![node];
        if self.at("else") {
            let else_line = self.line();
            self.pos += 1;
            let mut branch = Statement::new(StatementKind::ElseBranch, "else".to_string(), else_line);
            branch.children = self.parse_substatement()?;
            out.push(branch);
        }
        Ok(out)
    }

    fn parse_for(&mut self) -> PResult<Statement> {
        let start = self.pos;
        let line = self.line();
        self.expect("for")?;
        self.expect("(")?;
        let save = self.pos;
        self.skip_param_modifiers()?;
        let enhanced = self
            .scan_type(self.pos)
            .filter(|(end, _)| self.is_ident_at(*end) && self.tok(end + 1).is_some_and(|t| t.is(":")));
        if let Some((end, ty)) = enhanced {
            self.pos = end;
            self.record_types(&ty);
            let name = self.ident()?.text.clone();
            self.fx().variables += 1;
            self.fx().declared_names.insert(name);
            self.expect(":")?;
            self.parse_expr()?;
        } else {
            self.pos = save;
            self.skip_param_modifiers()?;
            if let Some((end, ty)) = self.scan_local_decl_type() {
                self.pos = end;
                self.record_types(&ty);
                self.parse_declarators()?;
            } else {
                self.pos = save;
                self.parse_expr_list(";")?;
            }
            self.expect(";")?;
            if !self.at(";") {
                self.parse_expr()?;
            }
            self.expect(";")?;
            self.parse_expr_list(")")?;
        }
        self.expect(")")?;
        let mut node = self.leaf(StatementKind::For, start, line);
        node.children.extend(self.parse_substatement()?);
        Ok(node)
    }

    fn parse_expr_list(&mut self, terminator: &str) -> PResult<()> {
        while !self.at(terminator) {
            self.parse_expr()?;
            if !self.eat(",") {
                break;
            }
        }
        Ok(())
    }

    fn parse_try(&mut self) -> PResult<Vec<Statement>> {
        let start = self.pos;
        let line = self.line();
        self.expect("try")?;
        if self.eat("(") {
            while !self.at(")") {
                self.skip_param_modifiers()?;
                if let Some((end, ty)) = self.scan_local_decl_type() {
                    self.pos = end;
                    self.record_types(&ty);
                    let name = self.ident()?.text.clone();
                    self.fx().variables += 1;
                    self.fx().declared_names.insert(name);
                    self.expect("=")?;
                    self.parse_expr()?;
                } else {
                    self.parse_expr()?;
                }
                if !self.eat(";") {
                    break;
                }
            }
            self.expect(")")?;
        }
        let mut node = self.leaf(StatementKind::Try, start, line);
        node.children.extend(self.parse_nested_block()?);
        let mut out = vec![node];
        let mut handled = false;
        while self.at("catch") {
            let cstart = self.pos;
            let cline = self.line();
            self.pos += 1;
            self.expect("(")?;
            self.skip_param_modifiers()?;
            loop {
                let ty = self.parse_type()?;
                self.record_types(&ty);
                if !self.eat("|") {
                    break;
                }
            }
            let name = self.ident()?.text.clone();
            self.fx().declared_names.insert(name);
            self.expect(")")?;
            let mut catch = self.leaf(StatementKind::Catch, cstart, cline);
            catch.children = self.parse_nested_block()?;
            out.push(catch);
            handled = true;
        }
        if self.at("finally") {
            let fline = self.line();
            self.pos += 1;
            let mut fin = Statement::new(StatementKind::Finally, "finally".to_string(), fline);
            fin.children = self.parse_nested_block()?;
            out.push(fin);
            handled = true;
        }
        if !handled && !self.toks[start + 1].is("(") {
            return Err(self.error("expected `catch` or `finally`"));
        }
        Ok(out)
    }

    /// Parses a switch statement or expression; returns the `Switch` node.
    fn parse_switch(&mut self) -> PResult<Statement> {
        let start = self.pos;
        let line = self.line();
        let saved = self.take_pending();
        self.expect("switch")?;
        self.parse_paren_expr()?;
        let mut node = self.leaf(StatementKind::Switch, start, line);
        self.expect("{")?;
        self.enter_block();
        while !self.at("}") {
            if self.peek().is_none() {
                return Err(self.error("expected `}`"));
            }
            let lstart = self.pos;
            let lline = self.line();
            if self.eat("default") {
            } else if self.eat("case") {
                self.parse_case_labels()?;
            } else {
                return Err(self.error("expected `case` or `default`"));
            }
            let arrow = self.at("->");
            if !arrow {
                self.expect(":")?;
            } else {
                self.pos += 1;
            }
            let mut case = Statement::new(StatementKind::SwitchCase, self.text(lstart, self.pos), lline);
            case.children = self.take_pending();
            if arrow {
                if self.at("{") {
                    case.children.extend(self.parse_nested_block()?);
                } else if self.at("throw") {
                    case.children.extend(self.parse_statement()?);
                } else {
                    let estart = self.pos;
                    let eline = self.line();
                    let inner_saved = self.take_pending();
                    self.parse_expr()?;
                    self.expect(";")?;
                    let expr = self.leaf(StatementKind::Expression, estart, eline);
                    self.pending = inner_saved;
                    case.children.push(expr);
                }
            } else {
                while !self.at("case") && !self.at("default") && !self.at("}") {
                    if self.peek().is_none() {
                        return Err(self.error("expected `}`"));
                    }
                    case.children.extend(self.parse_statement()?);
                }
                // `default` used as a modifier can't start a statement here.
                if self.at("default") && !(self.at_n(1, ":") || self.at_n(1, "->")) {
                    return Err(self.error("unexpected `default`"));
                }
            }
            node.children.push(case);
        }
        self.pos += 1;
        self.exit_block();
        self.pending = saved;
        Ok(node)
    }

    fn parse_case_labels(&mut self) -> PResult<()> {
        loop {
            if self.eat("default") {
            } else if let Some((end, ty)) =
                self.scan_type(self.pos).filter(|(end, _)| self.is_ident_at(*end) || self.tok(*end).is_some_and(|t| t.is("(")))
            {
                // Type or record pattern.
                self.pos = end;
                self.record_types(&ty);
                if self.at("(") {
                    self.skip_balanced("(", ")")?;
                }
                if self.is_ident_at(self.pos) && !self.at("when") {
                    let name = self.ident()?.text.clone();
                    self.fx().declared_names.insert(name);
                }
            } else {
                self.parse_ternary()?;
            }
            if self.at("when") {
                self.pos += 1;
                self.parse_ternary()?;
            }
            if !self.eat(",") {
                return Ok(());
            }
        }
    }

    fn parse_local_class(&mut self, _mods: Mods) -> PResult<Statement> {
        let start = self.pos;
        let line = self.line();
        let kind = if self.eat("class") {
            TypeKind::Class
        } else if self.eat("interface") {
            TypeKind::Interface
        } else if self.eat("enum") {
            TypeKind::Enum
        } else if self.eat("record") {
            TypeKind::Record
        } else {
            self.expect("@")?;
            self.expect("interface")?;
            TypeKind::Annotation
        };
        let name = self.ident()?.text.clone();
        if self.at("<") {
            let (_, bounds) = self.parse_type_parameters()?;
            self.fx().referenced_types.extend(bounds);
        }
        if kind == TypeKind::Record && self.at("(") {
            self.expect("(")?;
            while !self.at(")") {
                self.skip_annotations()?;
                let ty = self.parse_type()?;
                self.record_types(&ty);
                self.eat("...");
                self.ident()?;
                if !self.eat(",") {
                    break;
                }
            }
            self.expect(")")?;
        }
        while self.eat("extends") || self.eat("implements") {
            loop {
                let ty = self.parse_type()?;
                self.record_types(&ty);
                if !self.eat(",") {
                    break;
                }
            }
        }
        let header_end = self.pos;
        let header = Header { simple_name: &name, kind, qualified_name: &name };
        let mut parts = ClassParts::default();
        self.parse_class_body(&header, true, &mut parts)?;
        let mut node = Statement::new(StatementKind::LocalClass, self.text(start, header_end), line);
        node.children = parts.inline_nodes;
        Ok(node)
    }

    fn parse_anonymous_body(&mut self, line: usize) -> PResult<Statement> {
        let header = Header { simple_name: "", kind: TypeKind::Class, qualified_name: "" };
        let mut parts = ClassParts::default();
        let saved = self.take_pending();
        self.parse_class_body(&header, true, &mut parts)?;
        self.pending = saved;
        let mut node = Statement::new(StatementKind::AnonymousClassBody, "{".to_string(), line);
        node.children = parts.inline_nodes;
        Ok(node)
    }

    // ----------------------------------------------------------------------
    // expressions

    fn lambda_ahead(&self) -> bool {
        let Some(t) = self.peek() else { return false };
        if t.is_ident() && self.at_n(1, "->") {
            return true;
        }
        if !t.is("(") {
            return false;
        }
        let mut depth = 0usize;
        let mut i = self.pos;
        while let Some(t) = self.tok(i) {
            if t.is("(") {
                depth += 1;
            } else if t.is(")") {
                depth -= 1;
                if depth == 0 {
                    return self.tok(i + 1).is_some_and(|t| t.is("->"));
                }
            } else if t.is(";") || t.is("{") || t.is("}") {
                return false;
            }
            i += 1;
        }
        false
    }

    fn parse_lambda(&mut self) -> PResult<()> {
        let start = self.pos;
        let line = self.line();
        if self.eat("(") {
            while !self.at(")") {
                self.skip_param_modifiers()?;
                // `(a, b)` or `(int a, String b)`
                if self.is_ident_at(self.pos) && (self.at_n(1, ",") || self.at_n(1, ")")) {
                    let name = self.ident()?.text.clone();
                    self.fx().declared_names.insert(name);
                } else {
                    let ty = self.parse_type()?;
                    self.record_types(&ty);
                    self.eat("...");
                    let name = self.ident()?.text.clone();
                    self.fx().declared_names.insert(name);
                }
                if !self.eat(",") {
                    break;
                }
            }
            self.expect(")")?;
        } else {
            let name = self.ident()?.text.clone();
            self.fx().declared_names.insert(name);
        }
        self.expect("->")?;
        let saved = self.take_pending();
        let node = if self.at("{") {
            let header = self.text(start, self.pos);
            let children = self.parse_nested_block()?;
            let mut node = Statement::new(StatementKind::LambdaBody, header, line);
            node.children = children;
            node
        } else {
            self.parse_expr()?;
            let mut node = Statement::new(StatementKind::LambdaBody, self.text(start, self.pos), line);
            node.children = self.take_pending();
            node
        };
        self.pending = saved;
        self.pending.push(node);
        Ok(())
    }

    fn parse_expr(&mut self) -> PResult<ExprKind> {
        if self.lambda_ahead() {
            self.parse_lambda()?;
            return Ok(ExprKind::Other);
        }
        self.parse_ternary()?;
        if let Some(n) = self.assignment_op() {
            self.pos += n;
            self.fx().assignments += 1;
            self.parse_expr()?;
            return Ok(ExprKind::Assign);
        }
        Ok(ExprKind::Other)
    }

    fn assignment_op(&self) -> Option<usize> {
        let t = self.peek()?;
        if t.kind != TokenKind::Op {
            return None;
        }
        match t.text.as_str() {
            "=" | "+=" | "-=" | "*=" | "/=" | "%=" | "&=" | "|=" | "^=" | "<<=" => Some(1),
            ">" if self.adjacent(self.pos) && self.at_n(1, ">=") => Some(2),
            ">" if self.adjacent(self.pos)
                && self.at_n(1, ">")
                && self.adjacent(self.pos + 1)
                && self.at_n(2, ">=") =>
            {
                Some(3)
            }
            _ => None,
        }
    }

    fn parse_ternary(&mut self) -> PResult<()> {
        self.parse_binary(1)?;
        if self.eat("?") {
            self.fx().ternaries += 1;
            self.parse_expr()?;
            self.expect(":")?;
            if self.lambda_ahead() {
                self.parse_lambda()?;
            } else {
                self.parse_ternary()?;
            }
        }
        Ok(())
    }

    /// Binary operator at the cursor: (tokens consumed, precedence, text).
    fn binary_op(&self) -> Option<(usize, u8, &'static str)> {
        let t = self.peek()?;
        if t.kind == TokenKind::Ident {
            return (t.text == "instanceof").then_some((1, 7, "instanceof"));
        }
        if t.kind != TokenKind::Op {
            return None;
        }
        Some(match t.text.as_str() {
            "||" => (1, 1, "||"),
            "&&" => (1, 2, "&&"),
            "|" => (1, 3, "|"),
            "^" => (1, 4, "^"),
            "&" => (1, 5, "&"),
            "==" => (1, 6, "=="),
            "!=" => (1, 6, "!="),
            "<" => (1, 7, "<"),
            "<=" => (1, 7, "<="),
            ">=" => (1, 7, ">="),
            "<<" => (1, 8, "<<"),
            "+" => (1, 9, "+"),
            "-" => (1, 9, "-"),
            "*" => (1, 10, "*"),
            "/" => (1, 10, "/"),
            "%" => (1, 10, "%"),
            ">" => {
                let p = self.pos;
                if self.adjacent(p) && self.at_n(1, ">") {
                    if self.adjacent(p + 1) && self.at_n(2, ">=") {
                        return None; // `>>>=`
                    }
                    if self.adjacent(p + 1) && self.at_n(2, ">") {
                        (3, 8, ">>>")
                    } else {
                        (2, 8, ">>")
                    }
                } else if self.adjacent(p) && self.at_n(1, ">=") {
                    return None; // `>>=`
                } else {
                    (1, 7, ">")
                }
            }
            _ => return None,
        })
    }

    fn parse_binary(&mut self, min_prec: u8) -> PResult<()> {
        self.parse_unary()?;
        while let Some((n, prec, op)) = self.binary_op() {
            if prec < min_prec {
                break;
            }
            self.pos += n;
            if op == "instanceof" {
                self.eat("final");
                let ty = self.parse_type()?;
                self.record_types(&ty);
                if self.at("(") {
                    self.skip_balanced("(", ")")?;
                }
                if self.is_ident_at(self.pos) {
                    let name = self.ident()?.text.clone();
                    self.fx().declared_names.insert(name);
                }
                continue;
            }
            match op {
                "==" | "!=" => self.fx().comparisons += 1,
                "&&" | "||" => self.fx().logical_operators += 1,
                "+" | "-" | "*" | "/" | "%" | "<<" | ">>" | ">>>" => self.fx().math_operations += 1,
                _ => {}
            }
            self.parse_binary(prec + 1)?;
        }
        Ok(())
    }

    fn cast_ahead(&self) -> Option<(usize, Vec<TypeRef>)> {
        if !self.at("(") {
            return None;
        }
        let mut types = Vec::new();
        let (mut end, ty) = self.scan_type(self.pos + 1)?;
        let primitive = self.toks[self.pos + 1].kind == TokenKind::Ident && is_primitive(&self.toks[self.pos + 1].text);
        types.push(ty);
        while self.tok(end)?.is("&") {
            let (e, ty) = self.scan_type(end + 1)?;
            types.push(ty);
            end = e;
        }
        if !self.tok(end)?.is(")") {
            return None;
        }
        let next = self.tok(end + 1)?;
        let starts_operand = match next.kind {
            TokenKind::Number | TokenKind::Str | TokenKind::Char => true,
            TokenKind::Ident => {
                !is_keyword(&next.text) || matches!(next.text.as_str(), "this" | "super" | "new" | "true" | "false" | "null" | "switch")
            }
            TokenKind::Op => next.is("(") || next.is("!") || next.is("~") || (primitive && (next.is("-") || next.is("+"))),
        };
        if next.is("instanceof") {
            return None;
        }
        starts_operand.then_some((end + 1, types))
    }

    fn parse_unary(&mut self) -> PResult<()> {
        let Some(t) = self.peek() else {
            return Err(self.error("expected an expression"));
        };
        if t.kind == TokenKind::Op && matches!(t.text.as_str(), "+" | "-" | "!" | "~" | "++" | "--") {
            self.pos += 1;
            return self.parse_unary();
        }
        if let Some((end, types)) = self.cast_ahead() {
            self.pos = end;
            for ty in &types {
                self.record_types(ty);
            }
            if self.lambda_ahead() {
                return self.parse_lambda();
            }
            return self.parse_unary();
        }
        let start = self.pos;
        self.parse_primary()?;
        self.parse_postfix(start)
    }

    fn parse_arguments(&mut self) -> PResult<usize> {
        self.expect("(")?;
        let mut count = 0;
        while !self.at(")") {
            self.parse_expr()?;
            count += 1;
            if !self.eat(",") {
                break;
            }
        }
        self.expect(")")?;
        Ok(count)
    }

    fn record_call(&mut self, receiver: String, callee: String, arg_count: usize) {
        self.fx().invocations.push(InvocationRecord { receiver, callee, arg_count });
    }

    fn parse_primary(&mut self) -> PResult<()> {
        let Some(t) = self.peek() else {
            return Err(self.error("expected an expression"));
        };
        match t.kind {
            TokenKind::Number => {
                self.pos += 1;
                self.fx().numbers += 1;
                return Ok(());
            }
            TokenKind::Str => {
                self.pos += 1;
                self.fx().string_literals += 1;
                return Ok(());
            }
            TokenKind::Char => {
                self.pos += 1;
                return Ok(());
            }
            TokenKind::Op => {
                if t.is("(") {
                    self.pos += 1;
                    self.fx().parenthesized += 1;
                    self.parse_expr()?;
                    self.expect(")")?;
                    return Ok(());
                }
                if t.is("@") {
                    self.skip_annotations()?;
                    return self.parse_primary();
                }
                return Err(self.error("expected an expression"));
            }
            TokenKind::Ident => {}
        }
        match t.text.as_str() {
            "true" | "false" | "null" => {
                self.pos += 1;
            }
            "this" | "super" => {
                self.pos += 1;
                if self.at("(") {
                    // explicit constructor invocation
                    self.parse_arguments()?;
                } else if t.text == "this"
                    && self.at(".")
                    && self.is_ident_at(self.pos + 1)
                    && !self.at_n(2, "(")
                {
                    let name = self.toks[self.pos + 1].text.clone();
                    self.fx().this_uses.insert(name);
                }
            }
            "new" => self.parse_creator()?,
            "switch" => {
                let node = self.parse_switch()?;
                self.pending.push(node);
            }
            w if is_primitive(w) => {
                // `int.class`, `int[].class`, `int[]::new`
                self.parse_type()?;
            }
            w if is_keyword(w) => return Err(self.error("expected an expression")),
            _ => {
                let name = t.text.clone();
                self.pos += 1;
                if self.at("(") {
                    let n = self.parse_arguments()?;
                    self.record_call(String::new(), name, n);
                } else {
                    self.fx().name_uses.insert(name);
                }
            }
        }
        Ok(())
    }

    fn parse_creator(&mut self) -> PResult<()> {
        let line = self.line();
        self.expect("new")?;
        if self.at("<") {
            let mut sink = Vec::new();
            self.pos = self.scan_type_args(self.pos, &mut sink).ok_or_else(|| self.error("bad type arguments"))?;
        }
        self.skip_annotations()?;
        let t = self.ident_or_primitive()?;
        let mut names = Vec::new();
        let mut name = t.text.clone();
        loop {
            if self.at("<") {
                self.pos = self.scan_type_args(self.pos, &mut names).ok_or_else(|| self.error("bad type arguments"))?;
            }
            if self.at(".") && self.is_ident_at(self.pos + 1) {
                name.push('.');
                name.push_str(&self.toks[self.pos + 1].text);
                self.pos += 2;
            } else {
                break;
            }
        }
        if !is_primitive(&t.text) {
            names.insert(0, name);
        }
        self.fx().referenced_types.extend(names);

        if self.at("[") {
            while self.eat("[") {
                if !self.at("]") {
                    self.parse_expr()?;
                }
                self.expect("]")?;
            }
            if self.at("{") {
                self.parse_array_initializer()?;
            }
            return Ok(());
        }
        self.parse_arguments()?;
        if self.at("{") {
            let node = self.parse_anonymous_body(line)?;
            self.pending.push(node);
        }
        Ok(())
    }

    fn ident_or_primitive(&mut self) -> PResult<&'a Token> {
        match self.peek() {
            Some(t) if t.is_ident() || (t.kind == TokenKind::Ident && is_primitive(&t.text)) => {
                self.pos += 1;
                Ok(t)
            }
            _ => Err(self.error("expected a type name")),
        }
    }

    fn parse_postfix(&mut self, start: usize) -> PResult<()> {
        loop {
            if self.at(".") {
                let dot = self.pos;
                self.pos += 1;
                if self.at("<") {
                    let mut sink = Vec::new();
                    self.pos = self.scan_type_args(self.pos, &mut sink).ok_or_else(|| self.error("bad type arguments"))?;
                }
                if self.at("new") {
                    self.parse_creator()?;
                    continue;
                }
                let Some(t) = self.peek() else {
                    return Err(self.error("expected a member name"));
                };
                if t.kind != TokenKind::Ident {
                    return Err(self.error("expected a member name"));
                }
                self.pos += 1;
                if self.at("(") && !matches!(t.text.as_str(), "this" | "class") {
                    let receiver = self.text(start, dot);
                    let n = self.parse_arguments()?;
                    if t.text != "super" {
                        self.record_call(receiver, t.text.clone(), n);
                    }
                }
            } else if self.at("[") {
                self.pos += 1;
                self.parse_expr()?;
                self.expect("]")?;
            } else if self.at("++") || self.at("--") {
                self.pos += 1;
            } else if self.at("::") {
                self.pos += 1;
                if self.at("<") {
                    let mut sink = Vec::new();
                    self.pos = self.scan_type_args(self.pos, &mut sink).ok_or_else(|| self.error("bad type arguments"))?;
                }
                if !self.eat("new") {
                    self.ident()?;
                }
            } else if self.at("<") && self.generic_method_ref_ahead() {
                let mut sink = Vec::new();
                self.pos = self.scan_type_args(self.pos, &mut sink).expect("checked by lookahead");
            } else {
                return Ok(());
            }
        }
    }

    /// `Type<Args>::method`
    fn generic_method_ref_ahead(&self) -> bool {
        let mut sink = Vec::new();
        self.scan_type_args(self.pos, &mut sink)
            .and_then(|end| self.tok(end))
            .is_some_and(|t| t.is("::"))
    }
}
