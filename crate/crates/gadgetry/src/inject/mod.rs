//! The three gadget-enabling modification patterns.
//!
//! 1. [`pattern_transitive_serializable`] marks every abstract class and
//!    interface serializable, silently widening the deserializable surface.
//! 2. [`pattern_final_properties`] turns String/Class constants in
//!    serializable classes into private final instance fields, so their
//!    values become attacker-controlled under deserialization.
//! 3. [`pattern_interface_reachability`] adds a synthetic serializable class
//!    whose `hashCode` fans out to every platform-interface method reachable
//!    from the artifact's serializable classes, bridging trampoline entries
//!    to dormant call paths.
//!
//! [`apply_all`] runs 1+2, recomputes serializability on the intermediary,
//! then runs 3, so interfaces that became serializable in stage one enlarge
//! the synthetic class.
//!
//! Every pattern preserves untouched classes and non-class entries
//! byte-exactly and reports exactly what changed.

use crate::archive::{repackage, Artifact};
use crate::classfile::asm::{assemble_class, AsmInsn, ClassAsm, MethodAsm};
use crate::classfile::insn::op;
use crate::classfile::{
    flags, parse_class, rewrite_code, ClassFile, ClassFileError, CodeEdit, Constant, Insn,
    MemberInfo, PoolBuilder,
};
use crate::hierarchy::{
    build_graph, jcl_interfaces_of_serializable, serializability, PlatformCatalog,
    SerializabilityView, SERIALIZABLE,
};
use serde::ser::SerializeStruct;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use thiserror::Error;

/// Default internal name for the synthetic reachability class.
pub const DEFAULT_CALLER_NAME: &str = "support/Caller";

#[derive(Debug, Error)]
pub enum InjectError {
    #[error(transparent)]
    Archive(#[from] crate::archive::ArchiveError),
    #[error(transparent)]
    ClassFile(#[from] ClassFileError),
    #[error("invalid class name for the synthetic caller: {name:?}")]
    BadCallerName { name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PatternTag {
    TransitiveSerializable,
    FinalProperties,
    InterfaceReachability,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConstantKind {
    String,
    Class,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtractedConstant {
    pub class_name: String,
    pub kind: ConstantKind,
    pub value: String,
    pub field_name: String,
}

/// A list serialized as `{"count": n, "list": [...]}` so the count can never
/// drift from the list.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Counted<T>(pub Vec<T>);

impl<T: Serialize> Serialize for Counted<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Counted", 2)?;
        st.serialize_field("count", &self.0.len())?;
        st.serialize_field("list", &self.0)?;
        st.end()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InjectionReport {
    pub pattern: PatternTag,
    pub classes_modified: Counted<String>,
    pub constants_extracted: Counted<ExtractedConstant>,
    pub caller_interfaces: Counted<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub caller_class: Option<String>,
    /// Class-file major version of the assembled synthetic class.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub caller_class_version: Option<u16>,
    pub warnings: Vec<String>,
    /// For ALL: the three per-pattern sub-reports in application order.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub stages: Vec<InjectionReport>,
}

impl InjectionReport {
    fn new(pattern: PatternTag) -> Self {
        InjectionReport {
            pattern,
            classes_modified: Counted(Vec::new()),
            constants_extracted: Counted(Vec::new()),
            caller_interfaces: Counted(Vec::new()),
            caller_class: None,
            caller_class_version: None,
            warnings: Vec::new(),
            stages: Vec::new(),
        }
    }
}

fn warn_if_signed(artifact: &Artifact, changed: bool, warnings: &mut Vec<String>) {
    if changed {
        for path in artifact.signature_entries() {
            warnings.push(format!(
                "archive carries signing metadata {path}; modifications invalidate it"
            ));
        }
    }
}

/// Pattern 1: every abstract class or interface that is not yet serializable
/// gains the marker interface. Already-serializable types (directly or via a
/// supertype) and module descriptors are untouched, which makes the pattern
/// idempotent and keeps the diff minimal.
pub fn pattern_transitive_serializable(
    artifact: &Artifact,
    catalog: &PlatformCatalog,
) -> Result<(Artifact, InjectionReport), InjectError> {
    let mut report = InjectionReport::new(PatternTag::TransitiveSerializable);
    let graph = build_graph(artifact, catalog);
    let view = serializability(&graph);

    let mut replaced: BTreeMap<String, ClassFile> = BTreeMap::new();
    for (path, data) in artifact.class_entries() {
        let mut class = match parse_class(data) {
            Ok(c) => c,
            Err(e) => {
                report.warnings.push(format!("{path}: skipped unparseable class: {e}"));
                continue;
            }
        };
        if class.is_module() {
            continue;
        }
        if !(class.is_interface() || class.is_abstract()) {
            continue;
        }
        let name = class.class_name()?;
        if view.is_serializable(&name) {
            continue;
        }
        let mut builder = PoolBuilder::from_pool(class.pool);
        let marker = builder.class(SERIALIZABLE)?;
        class.pool = builder.into_pool();
        class.interfaces.push(marker);
        report.classes_modified.0.push(name);
        replaced.insert(path.to_string(), class);
    }

    warn_if_signed(artifact, !replaced.is_empty(), &mut report.warnings);
    let out = repackage(artifact, &replaced, &[])?;
    Ok((out, report))
}

/// Deterministic field name for an extracted constant: a fixed prefix plus a
/// stable hash over kind and value. The `val$` prefix mimics compiler-
/// generated capture fields.
fn extracted_field_name(kind: ConstantKind, value: &str) -> String {
    let mut h = Sha256::new();
    h.update(match kind {
        ConstantKind::String => b"S:".as_slice(),
        ConstantKind::Class => b"C:".as_slice(),
    });
    h.update(value.as_bytes());
    let digest = h.finalize();
    let hex: String = digest[..4].iter().map(|b| format!("{b:02x}")).collect();
    format!("val${hex}")
}

fn constant_descriptor(kind: ConstantKind) -> &'static str {
    match kind {
        ConstantKind::String => "Ljava/lang/String;",
        ConstantKind::Class => "Ljava/lang/Class;",
    }
}

/// A String or Class constant load site within one method.
struct Site {
    offset: u32,
    pool_index: u16,
    kind: ConstantKind,
    value: String,
}

fn scan_sites(class: &ClassFile, code: &[(u32, Insn)]) -> Vec<Site> {
    let mut out = Vec::new();
    for (offset, insn) in code {
        let index = match insn {
            Insn::Ldc(i) => *i as u16,
            Insn::LdcW(i) => *i,
            _ => continue,
        };
        match class.pool.try_get(index) {
            Some(Constant::String { string_index }) => {
                if let Ok(value) = class.pool.utf8_str(*string_index) {
                    out.push(Site { offset: *offset, pool_index: index, kind: ConstantKind::String, value });
                }
            }
            Some(Constant::Class { name_index }) => {
                if let Ok(value) = class.pool.utf8_str(*name_index) {
                    out.push(Site { offset: *offset, pool_index: index, kind: ConstantKind::Class, value });
                }
            }
            _ => {}
        }
    }
    out
}

fn ldc_of(index: u16) -> Insn {
    if index <= u8::MAX as u16 {
        Insn::Ldc(index as u8)
    } else {
        Insn::LdcW(index)
    }
}

/// Offset of the constructor's delegation call (`invokespecial` of `<init>`),
/// plus whether it targets the superclass rather than another constructor of
/// the same class.
fn delegation_site(class: &ClassFile, code: &[(u32, Insn)]) -> Option<(u32, Insn, bool)> {
    let this_name = class.class_name().ok()?;
    for (offset, insn) in code {
        if let Insn::Cp { op: op::INVOKESPECIAL, index } = insn {
            if let Ok((owner, name, _)) = class.pool.member_ref(*index) {
                if name == "<init>" {
                    return Some((*offset, insn.clone(), owner != this_name));
                }
            }
        }
    }
    None
}

/// Pattern 2: String/Class constants loaded inside instance methods of
/// serializable classes are extracted into private final fields, each load
/// site rewritten to `aload_0; getfield`, and every super-delegating
/// constructor initializes the fields right after delegation. Constructor and
/// static-initializer bodies are not rewrite sites; sites in static methods
/// cannot read an instance field and are reported and skipped.
pub fn pattern_final_properties(
    artifact: &Artifact,
    catalog: &PlatformCatalog,
) -> Result<(Artifact, InjectionReport), InjectError> {
    let mut report = InjectionReport::new(PatternTag::FinalProperties);
    let graph = build_graph(artifact, catalog);
    let view = serializability(&graph);

    let mut replaced: BTreeMap<String, ClassFile> = BTreeMap::new();
    for (path, data) in artifact.class_entries() {
        let class = match parse_class(data) {
            Ok(c) => c,
            Err(e) => {
                report.warnings.push(format!("{path}: skipped unparseable class: {e}"));
                continue;
            }
        };
        if class.is_module() || class.is_interface() {
            continue;
        }
        let name = match class.class_name() {
            Ok(n) => n,
            Err(e) => {
                report.warnings.push(format!("{path}: skipped: {e}"));
                continue;
            }
        };
        if !view.is_serializable(&name) {
            continue;
        }
        match extract_class_constants(&class, &name, &mut report) {
            Ok(Some(rewritten)) => {
                replaced.insert(path.to_string(), rewritten);
            }
            Ok(None) => {}
            Err(e) => {
                report.warnings.push(format!("{name}: skipped: {e}"));
            }
        }
    }

    warn_if_signed(artifact, !replaced.is_empty(), &mut report.warnings);
    let out = repackage(artifact, &replaced, &[])?;
    Ok((out, report))
}

/// Applies pattern 2 to one class. Returns None when the class has no
/// eligible sites.
fn extract_class_constants(
    class: &ClassFile,
    class_name: &str,
    report: &mut InjectionReport,
) -> Result<Option<ClassFile>, ClassFileError> {
    // Pass 1: find sites per method and the distinct constants, in first-
    // occurrence order.
    let mut constants: Vec<(ConstantKind, String, u16)> = Vec::new();
    let mut method_sites: Vec<(usize, Vec<Site>)> = Vec::new();
    for (mi, method) in class.methods.iter().enumerate() {
        let Some(body) = method.code() else { continue };
        let mname = method.name(&class.pool)?;
        if mname == "<init>" || mname == "<clinit>" {
            continue;
        }
        let sites = scan_sites(class, &body.code);
        if sites.is_empty() {
            continue;
        }
        if method.is_static() {
            for s in &sites {
                report.warnings.push(format!(
                    "{class_name}.{mname}: constant {:?} in static method left in place (no instance receiver)",
                    s.value
                ));
            }
            continue;
        }
        for s in &sites {
            if !constants.iter().any(|(k, v, _)| *k == s.kind && v == &s.value) {
                constants.push((s.kind, s.value.clone(), s.pool_index));
            }
        }
        method_sites.push((mi, sites));
    }
    if constants.is_empty() {
        return Ok(None);
    }

    let existing_fields: Vec<String> = class
        .fields
        .iter()
        .filter_map(|f| f.name(&class.pool).ok())
        .collect();

    // Pass 2: intern fields and build the rewritten class.
    let mut out = class.clone();
    let mut builder = PoolBuilder::from_pool(out.pool);
    let mut fieldrefs: Vec<(ConstantKind, String, u16, u16)> = Vec::new(); // +field ref, const idx
    for (kind, value, pool_index) in &constants {
        let field_name = extracted_field_name(*kind, value);
        if existing_fields.iter().any(|f| f == &field_name) {
            report.warnings.push(format!(
                "{class_name}: field {field_name} already exists; constant {value:?} left in place"
            ));
            continue;
        }
        let descriptor = constant_descriptor(*kind);
        let name_index = builder.utf8(&field_name)?;
        let descriptor_index = builder.utf8(descriptor)?;
        let fieldref = builder.fieldref(class_name, &field_name, descriptor)?;
        out.fields.push(MemberInfo {
            access_flags: flags::ACC_PRIVATE | flags::ACC_FINAL,
            name_index,
            descriptor_index,
            attributes: Vec::new(),
        });
        report.constants_extracted.0.push(ExtractedConstant {
            class_name: class_name.to_string(),
            kind: *kind,
            value: value.clone(),
            field_name,
        });
        fieldrefs.push((*kind, value.clone(), fieldref, *pool_index));
    }
    if fieldrefs.is_empty() {
        return Ok(None);
    }
    out.pool = builder.into_pool();

    let field_for = |kind: ConstantKind, value: &str| -> Option<u16> {
        fieldrefs.iter().find(|(k, v, _, _)| *k == kind && v == value).map(|(_, _, r, _)| *r)
    };

    // Rewrite load sites.
    for (mi, sites) in method_sites {
        let mut edits = Vec::new();
        for site in sites {
            let Some(fieldref) = field_for(site.kind, &site.value) else { continue };
            edits.push(CodeEdit {
                at: site.offset,
                replacement: vec![
                    Insn::Plain(op::ALOAD_0),
                    Insn::Cp { op: op::GETFIELD, index: fieldref },
                ],
            });
        }
        if edits.is_empty() {
            continue;
        }
        let body = out.methods[mi].code().expect("method had code in pass 1");
        let new_body = rewrite_code(body, &edits, &out.pool)?;
        *out.methods[mi].code_mut().expect("method had code in pass 1") = new_body;
    }

    // Initialize fields in every super-delegating constructor, immediately
    // after the delegation call. this()-delegating constructors are left
    // alone: the chained constructor performs the initialization.
    let mut any_ctor = false;
    for mi in 0..out.methods.len() {
        if out.methods[mi].name(&out.pool)? != "<init>" {
            continue;
        }
        let Some(body) = out.methods[mi].code() else { continue };
        any_ctor = true;
        match delegation_site(&out, &body.code) {
            Some((offset, insn, true)) => {
                let mut replacement = vec![insn];
                for (_, _, fieldref, const_idx) in &fieldrefs {
                    replacement.push(Insn::Plain(op::ALOAD_0));
                    replacement.push(ldc_of(*const_idx));
                    replacement.push(Insn::Cp { op: op::PUTFIELD, index: *fieldref });
                }
                let edits = [CodeEdit { at: offset, replacement }];
                let new_body = rewrite_code(body, &edits, &out.pool)?;
                *out.methods[mi].code_mut().expect("constructor has code") = new_body;
            }
            Some((_, _, false)) => {}
            None => {
                report.warnings.push(format!(
                    "{class_name}.<init>: no delegation call found; extracted fields not initialized in this constructor"
                ));
            }
        }
    }
    if !any_ctor {
        report.warnings.push(format!(
            "{class_name}: no constructor present; extracted fields are never initialized"
        ));
    }

    report.classes_modified.0.push(class_name.to_string());
    Ok(Some(out))
}

/// Lower-cases the first character of an internal name's simple name.
fn field_name_for_interface(internal: &str, taken: &[String]) -> String {
    let simple = internal.rsplit('/').next().unwrap_or(internal);
    let mut chars = simple.chars();
    let base = match chars.next() {
        Some(c) => c.to_lowercase().collect::<String>() + chars.as_str(),
        None => "iface".to_string(),
    };
    if !taken.iter().any(|t| t == &base) {
        return base;
    }
    // Same simple name from two packages: fall back to the full path.
    internal.replace('/', "_").to_lowercase()
}

fn normalize_caller_name(name: &str) -> Result<String, InjectError> {
    let normalized = name.replace('.', "/");
    let valid = !normalized.is_empty()
        && normalized
            .split('/')
            .all(|seg| !seg.is_empty() && !seg.contains([';', '[', '<', '>']));
    if !valid {
        return Err(InjectError::BadCallerName { name: name.to_string() });
    }
    Ok(normalized)
}

/// Builds the synthetic serializable class: one public field per housed
/// platform interface plus a generic object field, an all-fields constructor,
/// and a `hashCode` that invokes every abstract method of every housed
/// interface. Parameters are filled with housed fields where the type
/// matches, the object field for root-object parameters, null for other
/// references, and zero for primitives.
fn build_caller(
    caller_name: &str,
    housed: &[String],
    catalog: &PlatformCatalog,
    warnings: &mut Vec<String>,
) -> Result<ClassFile, InjectError> {
    let mut field_names: Vec<String> = Vec::with_capacity(housed.len());
    for iface in housed {
        let name = field_name_for_interface(iface, &field_names);
        field_names.push(name);
    }

    let object_desc = "Ljava/lang/Object;";
    let mut spec = ClassAsm::new(caller_name).implements(&[SERIALIZABLE]);
    let mut ctor_params = String::from("(");
    for (iface, fname) in housed.iter().zip(&field_names) {
        let desc = format!("L{iface};");
        spec = spec.field(flags::ACC_PUBLIC, fname, &desc);
        ctor_params.push_str(&desc);
    }
    spec = spec.field(flags::ACC_PUBLIC, "object", object_desc);
    ctor_params.push_str(object_desc);
    ctor_params.push_str(")V");

    // Constructor: delegate, then assign each field from its parameter.
    let mut ctor_insns = vec![
        AsmInsn::Aload(0),
        AsmInsn::invoke_special("java/lang/Object", "<init>", "()V"),
    ];
    for (slot, (iface, fname)) in housed.iter().zip(&field_names).enumerate() {
        ctor_insns.push(AsmInsn::Aload(0));
        ctor_insns.push(AsmInsn::Aload(slot as u16 + 1));
        ctor_insns.push(AsmInsn::put_field(caller_name, fname, &format!("L{iface};")));
    }
    ctor_insns.push(AsmInsn::Aload(0));
    ctor_insns.push(AsmInsn::Aload(housed.len() as u16 + 1));
    ctor_insns.push(AsmInsn::put_field(caller_name, "object", object_desc));
    ctor_insns.push(AsmInsn::Return);

    // hashCode: fan out to every abstract method of every housed interface.
    let mut hash_insns: Vec<AsmInsn> = Vec::new();
    let housed_field = |target: &str| -> Option<(String, String)> {
        housed
            .iter()
            .zip(&field_names)
            .find(|(i, _)| i.as_str() == target)
            .map(|(i, f)| (f.clone(), format!("L{i};")))
    };
    for (iface, fname) in housed.iter().zip(&field_names) {
        let Some(platform) = catalog.get(iface) else {
            warnings.push(format!(
                "{iface}: not in the platform catalog; no methods invoked on its field"
            ));
            continue;
        };
        for (mname, mdesc) in &platform.methods {
            let parsed = crate::classfile::parse_method_descriptor(mdesc)?;
            hash_insns.push(AsmInsn::Aload(0));
            hash_insns.push(AsmInsn::get_field(caller_name, fname, &format!("L{iface};")));
            for param in &parsed.params {
                use crate::classfile::JType;
                match param {
                    JType::Object(name) if name == "java/lang/Object" => {
                        hash_insns.push(AsmInsn::Aload(0));
                        hash_insns.push(AsmInsn::get_field(caller_name, "object", object_desc));
                    }
                    JType::Object(name) => match housed_field(name) {
                        Some((f, d)) => {
                            hash_insns.push(AsmInsn::Aload(0));
                            hash_insns.push(AsmInsn::get_field(caller_name, &f, &d));
                        }
                        None => hash_insns.push(AsmInsn::AconstNull),
                    },
                    JType::Array(..) => hash_insns.push(AsmInsn::AconstNull),
                    JType::Long => hash_insns.push(AsmInsn::Lconst0),
                    JType::Float => hash_insns.push(AsmInsn::Fconst0),
                    JType::Double => hash_insns.push(AsmInsn::Dconst0),
                    _ => hash_insns.push(AsmInsn::Iconst(0)),
                }
            }
            hash_insns.push(AsmInsn::invoke_interface(iface, mname, mdesc));
            match parsed.ret_slots() {
                0 => {}
                2 => hash_insns.push(AsmInsn::Pop2),
                _ => hash_insns.push(AsmInsn::Pop),
            }
        }
    }
    hash_insns.push(AsmInsn::Iconst(0));
    hash_insns.push(AsmInsn::Ireturn);

    spec.methods.clear();
    spec = spec
        .method(MethodAsm::new(flags::ACC_PUBLIC, "<init>", &ctor_params, ctor_insns))
        .method(MethodAsm::new(flags::ACC_PUBLIC, "hashCode", "()I", hash_insns));

    Ok(assemble_class(&spec)?)
}

/// Pattern 3: assemble the synthetic reachability class for the artifact's
/// current serializable surface and add it to the archive.
pub fn pattern_interface_reachability(
    artifact: &Artifact,
    catalog: &PlatformCatalog,
    caller_name: &str,
) -> Result<(Artifact, InjectionReport), InjectError> {
    let mut report = InjectionReport::new(PatternTag::InterfaceReachability);
    let caller_name = normalize_caller_name(caller_name)?;
    let graph = build_graph(artifact, catalog);
    let view = serializability(&graph);
    let housed: Vec<String> = jcl_interfaces_of_serializable(&graph, &view).into_iter().collect();

    let caller = build_caller(&caller_name, &housed, catalog, &mut report.warnings)?;
    report.caller_class = Some(caller_name);
    report.caller_class_version = Some(caller.major_version);
    report.caller_interfaces = Counted(housed);

    warn_if_signed(artifact, true, &mut report.warnings);
    let out = repackage(artifact, &BTreeMap::new(), &[caller])?;
    Ok((out, report))
}

/// All three patterns in the two-stage order: 1 then 2 produce an
/// intermediary; serializability is recomputed on it; 3 builds the synthetic
/// class against that enlarged surface.
pub fn apply_all(
    artifact: &Artifact,
    catalog: &PlatformCatalog,
    caller_name: &str,
) -> Result<(Artifact, InjectionReport), InjectError> {
    let (a1, r1) = pattern_transitive_serializable(artifact, catalog)?;
    let (a2, r2) = pattern_final_properties(&a1, catalog)?;
    let (a3, r3) = pattern_interface_reachability(&a2, catalog, caller_name)?;

    let mut classes: Vec<String> = r1.classes_modified.0.clone();
    classes.extend(r2.classes_modified.0.iter().cloned());
    classes.sort();
    classes.dedup();

    let report = InjectionReport {
        pattern: PatternTag::All,
        classes_modified: Counted(classes),
        constants_extracted: r2.constants_extracted.clone(),
        caller_interfaces: r3.caller_interfaces.clone(),
        caller_class: r3.caller_class.clone(),
        caller_class_version: r3.caller_class_version,
        warnings: [r1.warnings.clone(), r2.warnings.clone(), r3.warnings.clone()].concat(),
        stages: vec![r1, r2, r3],
    };
    Ok((a3, report))
}

/// Convenience: the serializability view of an artifact under a catalog.
pub fn view_of(artifact: &Artifact, catalog: &PlatformCatalog) -> SerializabilityView {
    serializability(&build_graph(artifact, catalog))
}
