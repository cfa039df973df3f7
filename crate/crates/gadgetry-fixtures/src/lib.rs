//! Synthetic JAR fixtures shared by the gadgetry test suites.
//!
//! Every builder returns a fully assembled [`Artifact`] whose class files
//! parse, emit byte-identically, and carry honest stack shapes. The two large
//! fixtures mirror the published gadget structures of real dependencies
//! (spring-beans' destroy-method chain and Apache OpenJPA's merged-result
//! chain) so end-to-end tests exercise realistic shapes instead of toys.

use gadgetry::archive::{Artifact, ArtifactFormat};
use gadgetry::classfile::asm::{assemble_class, AsmInsn, ClassAsm, CodeAsm, HandlerAsm, MethodAsm};
use gadgetry::classfile::flags::{
    ACC_FINAL, ACC_PRIVATE, ACC_PROTECTED, ACC_PUBLIC, ACC_STATIC,
};
use gadgetry::classfile::insn::op;
use gadgetry::classfile::{emit_class, Insn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SERIALIZABLE: &str = "java/io/Serializable";

/// Assembles class specs into an in-memory jar, one entry per class.
pub fn artifact_of(specs: &[ClassAsm]) -> Artifact {
    entries_artifact(specs, Vec::new())
}

fn entries_artifact(specs: &[ClassAsm], mut extra: Vec<(String, Vec<u8>)>) -> Artifact {
    let mut entries = vec![(
        "META-INF/MANIFEST.MF".to_string(),
        b"Manifest-Version: 1.0\r\nCreated-By: 11.0.2 (Oracle Corporation)\r\n\r\n".to_vec(),
    )];
    for spec in specs {
        let class = assemble_class(spec).expect("fixture class must assemble");
        entries.push((format!("{}.class", spec.name), emit_class(&class)));
    }
    entries.append(&mut extra);
    Artifact::from_entries(ArtifactFormat::Jar, entries).expect("fixture jar must build")
}

/// Serialized jar bytes for a fixture, ready to write to disk.
pub fn jar_bytes(artifact: &Artifact) -> Vec<u8> {
    artifact.write().expect("fixture jar must serialize")
}

const DBA: &str = "org/springframework/beans/factory/support/DisposableBeanAdapter";
const REFLECTION_UTILS: &str = "org/springframework/util/ReflectionUtils";

/// A jar mirroring spring-beans' dormant destroy-method chain: a class that
/// is `Runnable` and `Serializable` whose `run` walks through `destroy` and
/// `invokeCustomDestroyMethod` into `Method.invoke`, yet declares none of the
/// trampoline entry methods itself.
pub fn spring_beans() -> Artifact {
    let adapter = ClassAsm::new(DBA)
        .implements(&["java/lang/Runnable", SERIALIZABLE])
        .field(ACC_PRIVATE | ACC_FINAL, "bean", "Ljava/lang/Object;")
        .field(ACC_PRIVATE | ACC_FINAL, "beanName", "Ljava/lang/String;")
        .field(ACC_PRIVATE, "destroyMethodNames", "[Ljava/lang/String;")
        .method(MethodAsm::new(
            ACC_PUBLIC,
            "run",
            "()V",
            vec![
                AsmInsn::Aload(0),
                AsmInsn::invoke_virtual(DBA, "destroy", "()V"),
                AsmInsn::Return,
            ],
        ))
        .method(MethodAsm::new(
            ACC_PUBLIC,
            "destroy",
            "()V",
            vec![
                AsmInsn::Aload(0),
                AsmInsn::Aload(0),
                AsmInsn::Aload(0),
                AsmInsn::get_field(DBA, "destroyMethodNames", "[Ljava/lang/String;"),
                AsmInsn::Iconst(0),
                AsmInsn::Raw(Insn::Plain(op::AALOAD)),
                AsmInsn::invoke_virtual(
                    DBA,
                    "determineDestroyMethod",
                    "(Ljava/lang/String;)Ljava/lang/reflect/Method;",
                ),
                AsmInsn::invoke_special(
                    DBA,
                    "invokeCustomDestroyMethod",
                    "(Ljava/lang/reflect/Method;)V",
                ),
                AsmInsn::Return,
            ],
        ))
        .method(MethodAsm::new(
            ACC_PRIVATE,
            "determineDestroyMethod",
            "(Ljava/lang/String;)Ljava/lang/reflect/Method;",
            vec![AsmInsn::AconstNull, AsmInsn::Areturn],
        ))
        .method(MethodAsm::new(
            ACC_PRIVATE,
            "invokeCustomDestroyMethod",
            "(Ljava/lang/reflect/Method;)V",
            vec![
                AsmInsn::Aload(1),
                AsmInsn::invoke_static(
                    REFLECTION_UTILS,
                    "makeAccessible",
                    "(Ljava/lang/reflect/Method;)V",
                ),
                AsmInsn::Aload(1),
                AsmInsn::Aload(0),
                AsmInsn::get_field(DBA, "bean", "Ljava/lang/Object;"),
                AsmInsn::AconstNull,
                AsmInsn::invoke_virtual(
                    "java/lang/reflect/Method",
                    "invoke",
                    "(Ljava/lang/Object;[Ljava/lang/Object;)Ljava/lang/Object;",
                ),
                AsmInsn::Pop,
                AsmInsn::Return,
            ],
        ));
    let utils = ClassAsm::new(REFLECTION_UTILS).method(MethodAsm::new(
        ACC_PUBLIC | ACC_STATIC,
        "makeAccessible",
        "(Ljava/lang/reflect/Method;)V",
        vec![AsmInsn::Return],
    ));
    artifact_of(&[adapter, utils])
}

const JPA_CLOSEABLE: &str = "org/apache/openjpa/lib/util/Closeable";
const JPA_CONFIGURABLE: &str = "org/apache/openjpa/lib/conf/Configurable";
const JPA_RESULT: &str = "org/apache/openjpa/jdbc/sql/Result";
const JPA_MERGED: &str = "org/apache/openjpa/jdbc/sql/MergedResult";
const JPA_COMPARATOR: &str = "org/apache/openjpa/jdbc/sql/MergedResult$ResultComparator";
const JPA_RSR: &str = "org/apache/openjpa/jdbc/sql/ResultSetResult";
const JPA_UNION: &str = "org/apache/openjpa/jdbc/sql/LogicalUnion";
const JPA_UNION_COMPARATOR: &str = "org/apache/openjpa/jdbc/sql/LogicalUnion$ResultComparator";
const JPA_DICT: &str = "org/apache/openjpa/jdbc/sql/DBDictionary";
const JPA_PG_DICT: &str = "org/apache/openjpa/jdbc/sql/PostgresDictionary";
const JPA_PROXY_MAP: &str = "org/apache/openjpa/jdbc/meta/strats/LRSPProxyMap";
const JPA_ITERATOR: &str = "org/apache/openjpa/jdbc/meta/strats/LRSPProxyMap$ResultIterator";

const GET_OBJECT_DESC: &str = "(Ljava/sql/ResultSet;ILjava/util/Map;)Ljava/lang/Object;";
const ORDERING_PUBLIC_DESC: &str = "(Lorg/apache/openjpa/jdbc/sql/Result;I)Ljava/lang/Object;";
const ORDERING_PRIVATE_DESC: &str = "(Ljava/sql/ResultSet;Ljava/lang/Object;)Ljava/lang/Object;";

/// A jar mirroring Apache OpenJPA's dormant merged-result chain. Nothing in
/// it is serializable as shipped: the seven-frame path from `hasNext` down to
/// `Method.invoke` only becomes a gadget chain once interfaces are marked
/// serializable, the reflective string constants are field-extracted, and a
/// trampoline caller is repackaged in.
pub fn openjpa() -> Artifact {
    let closeable = ClassAsm::interface(JPA_CLOSEABLE)
        .method(MethodAsm::abstract_method(ACC_PUBLIC, "close", "()V"));
    let configurable = ClassAsm::interface(JPA_CONFIGURABLE)
        .method(MethodAsm::abstract_method(ACC_PUBLIC, "endConfiguration", "()V"));
    let result = ClassAsm::interface(JPA_RESULT)
        .implements(&[JPA_CLOSEABLE])
        .method(MethodAsm::abstract_method(ACC_PUBLIC, "next", "()Z"));
    let comparator = ClassAsm::interface(JPA_COMPARATOR)
        .implements(&["java/util/Comparator"])
        .method(MethodAsm::abstract_method(
            ACC_PUBLIC,
            "getOrderingValue",
            ORDERING_PUBLIC_DESC,
        ));

    let merged = ClassAsm::new(JPA_MERGED)
        .implements(&[JPA_RESULT])
        .field(ACC_PRIVATE | ACC_FINAL, "_res", "[Lorg/apache/openjpa/jdbc/sql/Result;")
        .field(ACC_PRIVATE | ACC_FINAL, "_status", "[B")
        .field(ACC_PRIVATE | ACC_FINAL, "_comp", &format!("L{JPA_COMPARATOR};"))
        .field(ACC_PRIVATE | ACC_FINAL, "_order", "[Ljava/lang/Object;")
        .field(ACC_PRIVATE, "_pushedBack", "Z")
        .method(MethodAsm::new(
            ACC_PUBLIC,
            "next",
            "()Z",
            vec![
                AsmInsn::Aload(0),
                AsmInsn::get_field(JPA_MERGED, "_order", "[Ljava/lang/Object;"),
                AsmInsn::Iconst(0),
                AsmInsn::Aload(0),
                AsmInsn::get_field(JPA_MERGED, "_comp", &format!("L{JPA_COMPARATOR};")),
                AsmInsn::Aload(0),
                AsmInsn::get_field(JPA_MERGED, "_res", "[Lorg/apache/openjpa/jdbc/sql/Result;"),
                AsmInsn::Iconst(0),
                AsmInsn::Raw(Insn::Plain(op::AALOAD)),
                AsmInsn::Iconst(0),
                AsmInsn::invoke_interface(JPA_COMPARATOR, "getOrderingValue", ORDERING_PUBLIC_DESC),
                AsmInsn::Raw(Insn::Plain(op::AASTORE)),
                AsmInsn::Iconst(0),
                AsmInsn::Ireturn,
            ],
        ))
        .method(MethodAsm::new(ACC_PUBLIC, "close", "()V", vec![AsmInsn::Return]));

    let result_set_result = ClassAsm::new(JPA_RSR)
        .implements(&[JPA_RESULT])
        .method(MethodAsm::new(
            ACC_PUBLIC,
            "next",
            "()Z",
            vec![AsmInsn::Iconst(0), AsmInsn::Ireturn],
        ))
        .method(MethodAsm::new(
            ACC_PUBLIC,
            "getResultSet",
            "()Ljava/sql/ResultSet;",
            vec![AsmInsn::AconstNull, AsmInsn::Areturn],
        ))
        .method(MethodAsm::new(ACC_PUBLIC, "close", "()V", vec![AsmInsn::Return]));

    let union = ClassAsm::new(JPA_UNION);
    let union_comparator = ClassAsm::new(JPA_UNION_COMPARATOR)
        .implements(&[JPA_COMPARATOR])
        .field(ACC_PRIVATE | ACC_FINAL, "_orders", "[Ljava/util/List;")
        .field(ACC_PRIVATE | ACC_FINAL, "_dict", &format!("L{JPA_DICT};"))
        .method(MethodAsm::new(
            ACC_PUBLIC,
            "getOrderingValue",
            ORDERING_PUBLIC_DESC,
            vec![
                AsmInsn::Aload(1),
                AsmInsn::Checkcast(JPA_RSR.to_string()),
                AsmInsn::invoke_virtual(JPA_RSR, "getResultSet", "()Ljava/sql/ResultSet;"),
                AsmInsn::Astore(3),
                AsmInsn::Aload(0),
                AsmInsn::get_field(JPA_UNION_COMPARATOR, "_orders", "[Ljava/util/List;"),
                AsmInsn::Iload(2),
                AsmInsn::Raw(Insn::Plain(op::AALOAD)),
                AsmInsn::invoke_interface("java/util/List", "size", "()I"),
                AsmInsn::Iconst(1),
                AsmInsn::Branch { op: op::IF_ICMPNE, target: 1 },
                AsmInsn::Aload(0),
                AsmInsn::Aload(3),
                AsmInsn::Aload(0),
                AsmInsn::get_field(JPA_UNION_COMPARATOR, "_orders", "[Ljava/util/List;"),
                AsmInsn::Iload(2),
                AsmInsn::Raw(Insn::Plain(op::AALOAD)),
                AsmInsn::Iconst(0),
                AsmInsn::invoke_interface("java/util/List", "get", "(I)Ljava/lang/Object;"),
                AsmInsn::invoke_special(
                    JPA_UNION_COMPARATOR,
                    "getOrderingValue",
                    ORDERING_PRIVATE_DESC,
                ),
                AsmInsn::Areturn,
                AsmInsn::Label(1),
                AsmInsn::AconstNull,
                AsmInsn::Areturn,
            ],
        ))
        .method(MethodAsm::new(
            ACC_PRIVATE,
            "getOrderingValue",
            ORDERING_PRIVATE_DESC,
            vec![
                AsmInsn::Aload(0),
                AsmInsn::get_field(JPA_UNION_COMPARATOR, "_dict", &format!("L{JPA_DICT};")),
                AsmInsn::Aload(1),
                AsmInsn::Aload(2),
                AsmInsn::Checkcast("java/lang/Integer".to_string()),
                AsmInsn::invoke_virtual("java/lang/Integer", "intValue", "()I"),
                AsmInsn::Iconst(1),
                AsmInsn::Raw(Insn::Plain(op::IADD)),
                AsmInsn::AconstNull,
                AsmInsn::invoke_virtual(JPA_DICT, "getObject", GET_OBJECT_DESC),
                AsmInsn::Areturn,
            ],
        ))
        .method(MethodAsm::new(
            ACC_PUBLIC,
            "compare",
            "(Ljava/lang/Object;Ljava/lang/Object;)I",
            vec![AsmInsn::Iconst(0), AsmInsn::Ireturn],
        ));

    let dictionary = ClassAsm::new(JPA_DICT)
        .implements(&[JPA_CONFIGURABLE])
        .method(MethodAsm::new(
            ACC_PUBLIC,
            "getObject",
            GET_OBJECT_DESC,
            vec![AsmInsn::AconstNull, AsmInsn::Areturn],
        ))
        .method(MethodAsm::new(ACC_PUBLIC, "endConfiguration", "()V", vec![AsmInsn::Return]));

    // try { reflective probe } catch (Throwable) { swallow }, then return the
    // object fetched from the superclass.
    let postgres = ClassAsm::new(JPA_PG_DICT).extends(JPA_DICT).method(MethodAsm {
        access_flags: ACC_PUBLIC,
        name: "getObject".into(),
        descriptor: GET_OBJECT_DESC.into(),
        code: Some(CodeAsm {
            insns: vec![
                AsmInsn::Aload(0),
                AsmInsn::Aload(1),
                AsmInsn::Iload(2),
                AsmInsn::Aload(3),
                AsmInsn::invoke_special(JPA_DICT, "getObject", GET_OBJECT_DESC),
                AsmInsn::Astore(4),
                AsmInsn::Aload(4),
                AsmInsn::invoke_virtual("java/lang/Object", "getClass", "()Ljava/lang/Class;"),
                AsmInsn::invoke_virtual("java/lang/Class", "getName", "()Ljava/lang/String;"),
                AsmInsn::LdcString("org.postgresql.util.PGobject".into()),
                AsmInsn::invoke_virtual("java/lang/String", "equals", "(Ljava/lang/Object;)Z"),
                AsmInsn::Branch { op: op::IFEQ, target: 3 },
                AsmInsn::Label(1),
                AsmInsn::Aload(4),
                AsmInsn::invoke_virtual("java/lang/Object", "getClass", "()Ljava/lang/Class;"),
                AsmInsn::LdcString("getType".into()),
                AsmInsn::AconstNull,
                AsmInsn::Checkcast("[Ljava/lang/Class;".to_string()),
                AsmInsn::invoke_virtual(
                    "java/lang/Class",
                    "getMethod",
                    "(Ljava/lang/String;[Ljava/lang/Class;)Ljava/lang/reflect/Method;",
                ),
                AsmInsn::Astore(5),
                AsmInsn::Aload(5),
                AsmInsn::Aload(4),
                AsmInsn::AconstNull,
                AsmInsn::invoke_virtual(
                    "java/lang/reflect/Method",
                    "invoke",
                    "(Ljava/lang/Object;[Ljava/lang/Object;)Ljava/lang/Object;",
                ),
                AsmInsn::Astore(6),
                AsmInsn::Label(2),
                AsmInsn::goto(3),
                AsmInsn::Label(4),
                AsmInsn::Pop,
                AsmInsn::Label(3),
                AsmInsn::Aload(4),
                AsmInsn::Areturn,
            ],
            handlers: vec![HandlerAsm {
                start: 1,
                end: 2,
                handler: 4,
                catch_type: Some("java/lang/Throwable".into()),
            }],
            ..Default::default()
        }),
    });

    let proxy_map = ClassAsm::new(JPA_PROXY_MAP);
    let result_iterator = ClassAsm::new(JPA_ITERATOR)
        .implements(&["java/util/Iterator", JPA_CLOSEABLE])
        .field(ACC_PRIVATE | ACC_FINAL, "_res", "[Lorg/apache/openjpa/jdbc/sql/Result;")
        .field(ACC_PRIVATE, "_next", "Ljava/lang/Boolean;")
        .method(MethodAsm::new(
            ACC_PUBLIC,
            "hasNext",
            "()Z",
            vec![
                AsmInsn::Aload(0),
                AsmInsn::get_field(JPA_ITERATOR, "_next", "Ljava/lang/Boolean;"),
                AsmInsn::Branch { op: op::IFNONNULL, target: 1 },
                AsmInsn::Aload(0),
                AsmInsn::get_field(JPA_ITERATOR, "_res", "[Lorg/apache/openjpa/jdbc/sql/Result;"),
                AsmInsn::Iconst(0),
                AsmInsn::Raw(Insn::Plain(op::AALOAD)),
                AsmInsn::invoke_interface(JPA_RESULT, "next", "()Z"),
                AsmInsn::Pop,
                AsmInsn::Label(1),
                AsmInsn::Aload(0),
                AsmInsn::get_field(JPA_ITERATOR, "_next", "Ljava/lang/Boolean;"),
                AsmInsn::invoke_virtual("java/lang/Boolean", "booleanValue", "()Z"),
                AsmInsn::Ireturn,
            ],
        ))
        .method(MethodAsm::new(
            ACC_PUBLIC,
            "next",
            "()Ljava/lang/Object;",
            vec![AsmInsn::AconstNull, AsmInsn::Areturn],
        ))
        .method(MethodAsm::new(ACC_PUBLIC, "remove", "()V", vec![AsmInsn::Return]))
        .method(MethodAsm::new(ACC_PUBLIC, "close", "()V", vec![AsmInsn::Return]));

    artifact_of(&[
        closeable,
        configurable,
        result,
        comparator,
        merged,
        result_set_result,
        union,
        union_comparator,
        dictionary,
        postgres,
        proxy_map,
        result_iterator,
    ])
}

/// The classes forming the seven-frame chain through the [`openjpa`] fixture
/// once all modification stages ran, in entry-to-sink order. The trampoline
/// caller's `hashCode` precedes them and `Method.invoke` terminates them.
pub fn openjpa_chain_owners() -> [(&'static str, &'static str); 5] {
    [
        (JPA_ITERATOR, "hasNext"),
        (JPA_MERGED, "next"),
        (JPA_UNION_COMPARATOR, "getOrderingValue"),
        (JPA_UNION_COMPARATOR, "getOrderingValue"),
        (JPA_PG_DICT, "getObject"),
    ]
}

/// A serializable class whose method resolves a reflective target from a
/// Class constant and a String constant, then invokes it: the minimal shape
/// the constant-extraction stage rewrites into field loads.
pub fn reflective_constants() -> Artifact {
    const OWNER: &str = "com/example/NotVuln";
    const OTHER: &str = "com/example/OtherClass";
    let not_vuln = ClassAsm::new(OWNER).implements(&[SERIALIZABLE]).method(MethodAsm::new(
        ACC_PUBLIC,
        "method",
        "(Ljava/lang/Object;)V",
        vec![
            AsmInsn::LdcClassRef(OTHER.into()),
            AsmInsn::LdcString("m".into()),
            AsmInsn::AconstNull,
            AsmInsn::invoke_virtual(
                "java/lang/Class",
                "getMethod",
                "(Ljava/lang/String;[Ljava/lang/Class;)Ljava/lang/reflect/Method;",
            ),
            AsmInsn::Astore(2),
            AsmInsn::Aload(2),
            AsmInsn::Aload(1),
            AsmInsn::AconstNull,
            AsmInsn::invoke_virtual(
                "java/lang/reflect/Method",
                "invoke",
                "(Ljava/lang/Object;[Ljava/lang/Object;)Ljava/lang/Object;",
            ),
            AsmInsn::Pop,
            AsmInsn::Return,
        ],
    ));
    let other = ClassAsm::new(OTHER).method(MethodAsm::new(
        ACC_PUBLIC,
        "m",
        "()V",
        vec![AsmInsn::Return],
    ));
    artifact_of(&[not_vuln, other])
}

/// A serializable class with forward branches that jump over String-constant
/// load sites: `pick`'s branch spans one site, `tag`'s spans two. Constant
/// extraction grows each spanned site by two bytes, so the branch offsets
/// must be fixed up by exactly that much.
pub fn branching_constants() -> Artifact {
    let class = ClassAsm::new("com/example/Branchy")
        .implements(&[SERIALIZABLE])
        .method(MethodAsm::new(
            ACC_PUBLIC,
            "pick",
            "(I)Ljava/lang/String;",
            vec![
                AsmInsn::Iload(1),
                AsmInsn::Branch { op: op::IFEQ, target: 1 },
                AsmInsn::LdcString("left".into()),
                AsmInsn::Areturn,
                AsmInsn::Label(1),
                AsmInsn::LdcString("right".into()),
                AsmInsn::Areturn,
            ],
        ))
        .method(MethodAsm::new(
            ACC_PUBLIC,
            "tag",
            "(I)Ljava/lang/String;",
            vec![
                AsmInsn::Iload(1),
                AsmInsn::Branch { op: op::IFEQ, target: 1 },
                AsmInsn::LdcString("alpha".into()),
                AsmInsn::Pop,
                AsmInsn::LdcString("beta".into()),
                AsmInsn::Pop,
                AsmInsn::Label(1),
                AsmInsn::AconstNull,
                AsmInsn::Areturn,
            ],
        ));
    artifact_of(&[class])
}

/// `Base` implements `Runnable` without being serializable; `Child` extends
/// it and is. The platform interface must be attributed to the serializable
/// subclass through inheritance.
pub fn inherited_runnable() -> Artifact {
    let base = ClassAsm::new("demo/Base")
        .implements(&["java/lang/Runnable"])
        .method(MethodAsm::new(ACC_PUBLIC, "run", "()V", vec![AsmInsn::Return]));
    let child = ClassAsm::new("demo/Child").extends("demo/Base").implements(&[SERIALIZABLE]);
    artifact_of(&[base, child])
}

/// One serializable class implementing both `Runnable` and `Iterator`, the
/// canonical input for checking the synthetic caller's full shape.
pub fn runnable_iterator_worker() -> Artifact {
    let worker = ClassAsm::new("demo/Worker")
        .implements(&["java/lang/Runnable", "java/util/Iterator", SERIALIZABLE])
        .method(MethodAsm::new(ACC_PUBLIC, "run", "()V", vec![AsmInsn::Return]))
        .method(MethodAsm::new(
            ACC_PUBLIC,
            "hasNext",
            "()Z",
            vec![AsmInsn::Iconst(0), AsmInsn::Ireturn],
        ))
        .method(MethodAsm::new(
            ACC_PUBLIC,
            "next",
            "()Ljava/lang/Object;",
            vec![AsmInsn::AconstNull, AsmInsn::Areturn],
        ))
        .method(MethodAsm::new(ACC_PUBLIC, "remove", "()V", vec![AsmInsn::Return]));
    artifact_of(&[worker])
}

/// Two plain classes with no serializable type anywhere.
pub fn serialization_free() -> Artifact {
    artifact_of(&[
        ClassAsm::new("plain/Alpha").method(MethodAsm::new(
            ACC_PUBLIC,
            "work",
            "()V",
            vec![AsmInsn::Return],
        )),
        ClassAsm::new("plain/Beta").field(ACC_PRIVATE, "count", "I"),
    ])
}

/// Three old/new version pairs, one per membership-change cause: a new
/// serializable class appears; an existing class starts listing the marker
/// itself; a superclass change pulls a subclass in indirectly.
pub fn membership_change_pairs() -> [(Artifact, Artifact); 3] {
    let class_added = (
        artifact_of(&[ClassAsm::new("ex/Util")]),
        artifact_of(&[
            ClassAsm::new("ex/Util"),
            ClassAsm::new("ex/Payload").implements(&[SERIALIZABLE]),
        ]),
    );
    let direct_add = (
        artifact_of(&[ClassAsm::new("ex/Model")]),
        artifact_of(&[ClassAsm::new("ex/Model").implements(&[SERIALIZABLE])]),
    );
    let indirect_add = (
        artifact_of(&[ClassAsm::new("ex/Parent"), ClassAsm::new("ex/Leaf").extends("ex/Parent")]),
        artifact_of(&[
            ClassAsm::new("ex/Parent").implements(&[SERIALIZABLE]),
            ClassAsm::new("ex/Leaf").extends("ex/Parent"),
        ]),
    );
    [class_added, direct_add, indirect_add]
}

/// Every named fixture jar, labeled, for postcondition sweeps that must hold
/// on all of them.
pub fn all_fixture_artifacts() -> Vec<(&'static str, Artifact)> {
    vec![
        ("spring-beans", spring_beans()),
        ("openjpa", openjpa()),
        ("reflective-constants", reflective_constants()),
        ("branching-constants", branching_constants()),
        ("inherited-runnable", inherited_runnable()),
        ("runnable-iterator-worker", runnable_iterator_worker()),
        ("serialization-free", serialization_free()),
    ]
}

/// Hand-written bytes for `public class Hello { public static void main
/// (String[] args) {} }` as a javac-style compiler lays it out: major 52,
/// LineNumberTable inside each Code attribute, SourceFile at class level.
pub fn compiled_hello_class() -> Vec<u8> {
    let mut b: Vec<u8> = Vec::with_capacity(280);
    b.extend([0xca, 0xfe, 0xba, 0xbe, 0x00, 0x00, 0x00, 0x34]);
    b.extend([0x00, 0x0f]); // pool count: entries 1..=14
    b.extend([0x0a, 0x00, 0x02, 0x00, 0x03]); // 1 Methodref #2.#3
    b.extend([0x07, 0x00, 0x04]); // 2 Class #4
    b.extend([0x0c, 0x00, 0x05, 0x00, 0x06]); // 3 NameAndType #5:#6
    push_utf8(&mut b, "java/lang/Object"); // 4
    push_utf8(&mut b, "<init>"); // 5
    push_utf8(&mut b, "()V"); // 6
    b.extend([0x07, 0x00, 0x08]); // 7 Class #8
    push_utf8(&mut b, "Hello"); // 8
    push_utf8(&mut b, "Code"); // 9
    push_utf8(&mut b, "LineNumberTable"); // 10
    push_utf8(&mut b, "main"); // 11
    push_utf8(&mut b, "([Ljava/lang/String;)V"); // 12
    push_utf8(&mut b, "SourceFile"); // 13
    push_utf8(&mut b, "Hello.java"); // 14
    b.extend([0x00, 0x21]); // ACC_PUBLIC | ACC_SUPER
    b.extend([0x00, 0x07, 0x00, 0x02]); // this Hello, super Object
    b.extend([0x00, 0x00, 0x00, 0x00]); // no interfaces, no fields
    b.extend([0x00, 0x02]); // two methods
    // <init>()V: aload_0; invokespecial #1; return
    b.extend([0x00, 0x01, 0x00, 0x05, 0x00, 0x06, 0x00, 0x01]);
    b.extend([0x00, 0x09, 0x00, 0x00, 0x00, 0x1d]); // Code, length 29
    b.extend([0x00, 0x01, 0x00, 0x01, 0x00, 0x00, 0x00, 0x05]);
    b.extend([0x2a, 0xb7, 0x00, 0x01, 0xb1]);
    b.extend([0x00, 0x00, 0x00, 0x01]); // no handlers, one attribute
    b.extend([0x00, 0x0a, 0x00, 0x00, 0x00, 0x06, 0x00, 0x01, 0x00, 0x00, 0x00, 0x01]);
    // main([Ljava/lang/String;)V: return
    b.extend([0x00, 0x09, 0x00, 0x0b, 0x00, 0x0c, 0x00, 0x01]);
    b.extend([0x00, 0x09, 0x00, 0x00, 0x00, 0x19]); // Code, length 25
    b.extend([0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x01]);
    b.extend([0xb1]);
    b.extend([0x00, 0x00, 0x00, 0x01]);
    b.extend([0x00, 0x0a, 0x00, 0x00, 0x00, 0x06, 0x00, 0x01, 0x00, 0x00, 0x00, 0x02]);
    // class attributes: SourceFile "Hello.java"
    b.extend([0x00, 0x01, 0x00, 0x0d, 0x00, 0x00, 0x00, 0x02, 0x00, 0x0e]);
    b
}

/// Hand-written bytes for `public interface Greeter { void greet(); }` in
/// javac layout.
pub fn compiled_greeter_class() -> Vec<u8> {
    let mut b: Vec<u8> = Vec::with_capacity(120);
    b.extend([0xca, 0xfe, 0xba, 0xbe, 0x00, 0x00, 0x00, 0x34]);
    b.extend([0x00, 0x09]); // pool count: entries 1..=8
    b.extend([0x07, 0x00, 0x02]); // 1 Class #2
    push_utf8(&mut b, "Greeter"); // 2
    b.extend([0x07, 0x00, 0x04]); // 3 Class #4
    push_utf8(&mut b, "java/lang/Object"); // 4
    push_utf8(&mut b, "greet"); // 5
    push_utf8(&mut b, "()V"); // 6
    push_utf8(&mut b, "SourceFile"); // 7
    push_utf8(&mut b, "Greeter.java"); // 8
    b.extend([0x06, 0x01]); // ACC_PUBLIC | ACC_INTERFACE | ACC_ABSTRACT
    b.extend([0x00, 0x01, 0x00, 0x03]); // this Greeter, super Object
    b.extend([0x00, 0x00, 0x00, 0x00]); // no interfaces, no fields
    b.extend([0x00, 0x01]); // one method
    b.extend([0x04, 0x01, 0x00, 0x05, 0x00, 0x06, 0x00, 0x00]); // abstract greet()V
    b.extend([0x00, 0x01, 0x00, 0x07, 0x00, 0x00, 0x00, 0x02, 0x00, 0x08]);
    b
}

fn push_utf8(buf: &mut Vec<u8>, s: &str) {
    buf.push(0x01);
    buf.extend((s.len() as u16).to_be_bytes());
    buf.extend(s.as_bytes());
}

/// Named class files covering the full instruction and pool surface: every
/// fixture jar's classes, a family of feature-focused assembled classes, and
/// the two hand-written compiler-layout samples. At least fifty entries.
pub fn roundtrip_corpus() -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for (label, artifact) in all_fixture_artifacts() {
        for (path, data) in artifact.class_entries() {
            out.push((format!("{label}/{path}"), data.to_vec()));
        }
    }
    for spec in variety_classes() {
        let class = assemble_class(&spec).expect("variety class must assemble");
        out.push((format!("variety/{}.class", spec.name), emit_class(&class)));
    }
    out.push(("compiled/Hello.class".into(), compiled_hello_class()));
    out.push(("compiled/Greeter.class".into(), compiled_greeter_class()));
    out
}

/// Feature-focused classes: wide constant pools, wide locals, two-slot
/// constants, switches, handlers with stack-map frames, non-ASCII names,
/// primitive field surfaces, and a chain of small generated shapes.
fn variety_classes() -> Vec<ClassAsm> {
    let mut specs: Vec<ClassAsm> = Vec::new();

    // Enough distinct strings to push ldc over the one-byte index boundary.
    let mut wide_pool_insns = Vec::new();
    for i in 0..300 {
        wide_pool_insns.push(AsmInsn::LdcString(format!("cst{i:03}")));
        wide_pool_insns.push(AsmInsn::Pop);
    }
    wide_pool_insns.push(AsmInsn::Return);
    specs.push(ClassAsm::new("var/WidePool").method(MethodAsm::new(
        ACC_PUBLIC,
        "spill",
        "()V",
        wide_pool_insns,
    )));

    specs.push(ClassAsm::new("var/WideLocals").method(MethodAsm::new(
        ACC_PUBLIC,
        "shuffle",
        "()V",
        vec![
            AsmInsn::AconstNull,
            AsmInsn::Astore(300),
            AsmInsn::Aload(300),
            AsmInsn::Pop,
            AsmInsn::Iconst(7),
            AsmInsn::Istore(65000),
            AsmInsn::Iload(65000),
            AsmInsn::Pop,
            AsmInsn::Raw(Insn::Wide(gadgetry::classfile::insn::WideInsn::Iinc {
                index: 300,
                delta: -1000,
            })),
            AsmInsn::Iinc { index: 5, delta: -1 },
            AsmInsn::Return,
        ],
    )));

    specs.push(
        ClassAsm::new("var/TwoSlot")
            .field(ACC_PRIVATE | ACC_STATIC, "BIG", "J")
            .method(MethodAsm::new(
                ACC_PUBLIC,
                "mix",
                "()J",
                vec![
                    AsmInsn::LdcLong(0x0123_4567_89ab_cdef),
                    AsmInsn::Pop2,
                    AsmInsn::LdcDouble(2.5f64.to_bits()),
                    AsmInsn::Pop2,
                    AsmInsn::Lconst0,
                    AsmInsn::Dconst0,
                    AsmInsn::Pop2,
                    AsmInsn::Lreturn,
                ],
            ))
            .method(MethodAsm::new(
                ACC_STATIC,
                "<clinit>",
                "()V",
                vec![
                    AsmInsn::LdcLong(42),
                    AsmInsn::PutStatic {
                        owner: "var/TwoSlot".into(),
                        name: "BIG".into(),
                        descriptor: "J".into(),
                    },
                    AsmInsn::Return,
                ],
            )),
    );

    specs.push(ClassAsm::new("var/Switchy").method(MethodAsm::new(
        ACC_PUBLIC,
        "route",
        "(I)I",
        vec![
            AsmInsn::Iload(1),
            AsmInsn::TableSwitch { low: -1, default: 0, targets: vec![1, 2, 3] },
            AsmInsn::Label(0),
            AsmInsn::Iload(1),
            AsmInsn::LookupSwitch { default: 1, pairs: vec![(-1000, 2), (0, 3), (70000, 1)] },
            AsmInsn::Label(1),
            AsmInsn::Iconst(10),
            AsmInsn::Ireturn,
            AsmInsn::Label(2),
            AsmInsn::Iconst(-2),
            AsmInsn::Ireturn,
            AsmInsn::Label(3),
            AsmInsn::Iconst(127),
            AsmInsn::Ireturn,
        ],
    )));

    specs.push(ClassAsm::new("var/Guarded").method(MethodAsm {
        access_flags: ACC_PUBLIC,
        name: "attempt".into(),
        descriptor: "()V".into(),
        code: Some(CodeAsm {
            insns: vec![
                AsmInsn::Label(0),
                AsmInsn::New("java/lang/IllegalStateException".into()),
                AsmInsn::Dup,
                AsmInsn::invoke_special("java/lang/IllegalStateException", "<init>", "()V"),
                AsmInsn::Athrow,
                AsmInsn::Label(1),
                AsmInsn::Label(2),
                AsmInsn::Pop,
                AsmInsn::Return,
            ],
            frames_at: vec![2],
            handlers: vec![HandlerAsm {
                start: 0,
                end: 1,
                handler: 2,
                catch_type: Some("java/lang/IllegalStateException".into()),
            }],
            ..Default::default()
        }),
    }));

    specs.push(
        ClassAsm::new("var/Größenwahn")
            .field(ACC_PRIVATE, "größe", "I")
            .method(MethodAsm::new(
                ACC_PUBLIC,
                "begrüßen",
                "()Ljava/lang/String;",
                vec![AsmInsn::LdcString("héllo wörld ユニコード".into()), AsmInsn::Areturn],
            )),
    );

    specs.push(
        ClassAsm::new("var/Primitives")
            .field(ACC_PUBLIC, "b", "B")
            .field(ACC_PUBLIC, "c", "C")
            .field(ACC_PUBLIC, "d", "D")
            .field(ACC_PUBLIC, "f", "F")
            .field(ACC_PUBLIC, "i", "I")
            .field(ACC_PUBLIC, "j", "J")
            .field(ACC_PUBLIC, "s", "S")
            .field(ACC_PUBLIC, "z", "Z")
            .field(ACC_PUBLIC | ACC_STATIC, "GRID", "[[I")
            .method(MethodAsm::new(
                ACC_PUBLIC,
                "fill",
                "()V",
                vec![
                    AsmInsn::Aload(0),
                    AsmInsn::Iconst(-1),
                    AsmInsn::put_field("var/Primitives", "i", "I"),
                    AsmInsn::Aload(0),
                    AsmInsn::Iconst(127),
                    AsmInsn::put_field("var/Primitives", "b", "B"),
                    AsmInsn::Aload(0),
                    AsmInsn::Iconst(128),
                    AsmInsn::put_field("var/Primitives", "s", "S"),
                    AsmInsn::Aload(0),
                    AsmInsn::Iconst(32768),
                    AsmInsn::put_field("var/Primitives", "i", "I"),
                    AsmInsn::Return,
                ],
            ))
            .method(MethodAsm::new(
                ACC_PUBLIC,
                "sizes",
                "()I",
                vec![
                    AsmInsn::Iconst(9),
                    AsmInsn::Raw(Insn::Newarray(10)),
                    AsmInsn::Raw(Insn::Plain(op::ARRAYLENGTH)),
                    AsmInsn::Ireturn,
                ],
            )),
    );

    specs.push(
        ClassAsm::interface("var/Mixins")
            .method(MethodAsm::abstract_method(ACC_PUBLIC, "combine", "([[D[Ljava/lang/String;)V"))
            .method(MethodAsm::abstract_method(ACC_PUBLIC, "weigh", "(JD)J"))
            .method(MethodAsm::abstract_method(ACC_PUBLIC, "pick", "(Ljava/util/List;I)Ljava/lang/Object;"))
            .method(MethodAsm::abstract_method(ACC_PUBLIC, "tags", "()[Ljava/lang/String;")),
    );

    // A chained family: each class extends the previous one and adds one
    // field and one method, exercising long supertype walks.
    for i in 0..20 {
        let name = format!("var/gen/Gen{i:02}");
        let mut spec = if i == 0 {
            ClassAsm::new(&name)
        } else {
            ClassAsm::new(&name).extends(&format!("var/gen/Gen{:02}", i - 1))
        };
        if i % 4 == 0 {
            spec = spec.implements(&[SERIALIZABLE]);
        }
        spec = spec.field(ACC_PROTECTED, &format!("slot{i}"), "Ljava/lang/Object;").method(
            MethodAsm::new(
                ACC_PUBLIC,
                &format!("step{i}"),
                "(I)I",
                vec![
                    AsmInsn::Iload(1),
                    AsmInsn::Iconst(i),
                    AsmInsn::Raw(Insn::Plain(op::IADD)),
                    AsmInsn::Ireturn,
                ],
            ),
        );
        specs.push(spec);
    }

    specs
}

/// A random type hierarchy plus a mutated successor version. Mutations mix
/// class additions and removals, marker toggles, and supertype rewires;
/// removals may leave dangling supertype names, as real version bumps do.
pub fn random_hierarchy_pair(seed: u64) -> (Artifact, Artifact) {
    #[derive(Clone)]
    struct Lite {
        iface: bool,
        super_of: Option<usize>,
        impls: Vec<usize>,
        marked: bool,
    }

    fn random_lite(rng: &mut ChaCha8Rng, existing: &[Option<Lite>]) -> Lite {
        let iface = rng.gen_bool(0.3);
        let concrete: Vec<usize> = existing
            .iter()
            .enumerate()
            .filter_map(|(j, s)| s.as_ref().filter(|s| !s.iface).map(|_| j))
            .collect();
        let ifaces: Vec<usize> = existing
            .iter()
            .enumerate()
            .filter_map(|(j, s)| s.as_ref().filter(|s| s.iface).map(|_| j))
            .collect();
        let super_of = if !iface && !concrete.is_empty() && rng.gen_bool(0.4) {
            Some(concrete[rng.gen_range(0..concrete.len())])
        } else {
            None
        };
        let mut impls = Vec::new();
        if !ifaces.is_empty() && rng.gen_bool(0.3) {
            impls.push(ifaces[rng.gen_range(0..ifaces.len())]);
        }
        Lite { iface, super_of, impls, marked: rng.gen_bool(0.3) }
    }

    fn materialize(specs: &[Option<Lite>]) -> Artifact {
        let name = |i: usize| format!("h/T{i}");
        let mut out = Vec::new();
        for (i, lite) in specs.iter().enumerate() {
            let Some(lite) = lite else { continue };
            let mut spec =
                if lite.iface { ClassAsm::interface(&name(i)) } else { ClassAsm::new(&name(i)) };
            if let Some(s) = lite.super_of {
                spec = spec.extends(&name(s));
            }
            let mut ifaces: Vec<String> = lite.impls.iter().map(|&j| name(j)).collect();
            if lite.marked {
                ifaces.push(SERIALIZABLE.to_string());
            }
            if !ifaces.is_empty() {
                let refs: Vec<&str> = ifaces.iter().map(String::as_str).collect();
                spec = spec.implements(&refs);
            }
            out.push(spec);
        }
        artifact_of(&out)
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3..=12usize);
    let mut old: Vec<Option<Lite>> = Vec::new();
    for _ in 0..n {
        let lite = random_lite(&mut rng, &old);
        old.push(Some(lite));
    }

    let mut new = old.clone();
    for _ in 0..rng.gen_range(1..=4usize) {
        match rng.gen_range(0..4u8) {
            0 => {
                let lite = random_lite(&mut rng, &new);
                new.push(Some(lite));
            }
            1 => {
                let alive: Vec<usize> =
                    (0..new.len()).filter(|&j| new[j].is_some()).collect();
                if !alive.is_empty() {
                    new[alive[rng.gen_range(0..alive.len())]] = None;
                }
            }
            2 => {
                let alive: Vec<usize> =
                    (0..new.len()).filter(|&j| new[j].is_some()).collect();
                if !alive.is_empty() {
                    let pick = alive[rng.gen_range(0..alive.len())];
                    let lite = new[pick].as_mut().unwrap();
                    lite.marked = !lite.marked;
                }
            }
            _ => {
                let concrete: Vec<usize> = (0..new.len())
                    .filter(|&j| new[j].as_ref().is_some_and(|s| !s.iface))
                    .collect();
                if concrete.len() >= 2 {
                    let child = concrete[rng.gen_range(1..concrete.len())];
                    let parents: Vec<usize> =
                        concrete.iter().copied().filter(|&p| p < child).collect();
                    let target = if rng.gen_bool(0.3) || parents.is_empty() {
                        None
                    } else {
                        Some(parents[rng.gen_range(0..parents.len())])
                    };
                    new[child].as_mut().unwrap().super_of = target;
                }
            }
        }
    }

    (materialize(&old), materialize(&new))
}

const PLATFORM_CALLS: [(&str, &str, &str, bool); 4] = [
    // (owner, name, descriptor, is_static); receivers are pushed as null.
    ("java/sql/DriverManager", "getConnection", "(Ljava/lang/String;)Ljava/sql/Connection;", true),
    ("java/lang/Class", "forName", "(Ljava/lang/String;)Ljava/lang/Class;", true),
    ("java/io/File", "delete", "()Z", false),
    ("java/lang/Object", "toString", "()Ljava/lang/String;", false),
];

/// A deterministic random artifact: at most ten classes in six call layers,
/// a mix of interfaces, inheritance, serializability, trampoline-named entry
/// methods, and platform calls (two of which are catalogued sinks). Same
/// seed, same bytes.
pub fn random_artifact(seed: u64) -> Artifact {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_classes = rng.gen_range(3..=10usize);

    struct Planned {
        spec: ClassAsm,
        level: usize,
        concrete: bool,
        /// Methods callable from higher layers: (name, returns_value).
        methods: Vec<(String, bool)>,
    }

    let mut planned: Vec<Planned> = Vec::new();
    for i in 0..n_classes {
        let name = format!("r/C{i}");
        let level = rng.gen_range(0..6usize);
        let make_interface = i > 0 && rng.gen_bool(0.2);
        if make_interface {
            let method = format!("act{i}");
            let spec = ClassAsm::interface(&name)
                .method(MethodAsm::abstract_method(ACC_PUBLIC, &method, "()V"));
            planned.push(Planned { spec, level, concrete: false, methods: vec![(method, false)] });
            continue;
        }

        let mut spec = ClassAsm::new(&name);
        let mut methods: Vec<(String, bool)> = Vec::new();
        if rng.gen_bool(0.5) {
            spec = spec.implements(&[SERIALIZABLE]);
        }
        let parents: Vec<usize> = (0..i).filter(|p| planned[*p].concrete).collect();
        if !parents.is_empty() && rng.gen_bool(0.3) {
            spec = spec.extends(&planned[parents[rng.gen_range(0..parents.len())]].spec.name);
        }
        let ifaces: Vec<usize> = (0..i).filter(|p| !planned[*p].concrete).collect();
        let mut implemented: Option<usize> = None;
        if !ifaces.is_empty() && rng.gen_bool(0.4) {
            let chosen = ifaces[rng.gen_range(0..ifaces.len())];
            let iface_name = planned[chosen].spec.name.clone();
            spec = spec.implements(&[&iface_name]);
            implemented = Some(chosen);
        }

        // Bodies may call strictly lower layers, keeping paths short and the
        // graph acyclic.
        let lower: Vec<usize> = (0..i)
            .filter(|p| {
                planned[*p].level < level && planned[*p].concrete && !planned[*p].methods.is_empty()
            })
            .collect();
        let lower_ifaces: Vec<usize> =
            (0..i).filter(|p| planned[*p].level < level && !planned[*p].concrete).collect();
        let body = |rng: &mut ChaCha8Rng| -> Vec<AsmInsn> {
            let mut insns = Vec::new();
            for _ in 0..rng.gen_range(0..=3usize) {
                match rng.gen_range(0..10u8) {
                    0..=3 if !lower.is_empty() => {
                        let t = &planned[lower[rng.gen_range(0..lower.len())]];
                        let (m, returns) = &t.methods[rng.gen_range(0..t.methods.len())];
                        let desc = if *returns { "()I" } else { "()V" };
                        insns.push(AsmInsn::AconstNull);
                        insns.push(AsmInsn::invoke_virtual(&t.spec.name, m, desc));
                        if *returns {
                            insns.push(AsmInsn::Pop);
                        }
                    }
                    4..=5 if !lower_ifaces.is_empty() => {
                        let t = &planned[lower_ifaces[rng.gen_range(0..lower_ifaces.len())]];
                        insns.push(AsmInsn::AconstNull);
                        insns.push(AsmInsn::invoke_interface(&t.spec.name, &t.methods[0].0, "()V"));
                    }
                    _ => {
                        let (owner, mname, desc, is_static) =
                            PLATFORM_CALLS[rng.gen_range(0..PLATFORM_CALLS.len())];
                        insns.push(AsmInsn::AconstNull);
                        insns.push(if is_static {
                            AsmInsn::invoke_static(owner, mname, desc)
                        } else {
                            AsmInsn::invoke_virtual(owner, mname, desc)
                        });
                        if desc.ends_with(';') || desc.ends_with('Z') {
                            insns.push(AsmInsn::Pop);
                        }
                    }
                }
            }
            insns
        };

        if let Some(chosen) = implemented {
            let mname = planned[chosen].methods[0].0.clone();
            let mut insns = body(&mut rng);
            insns.push(AsmInsn::Return);
            spec = spec.method(MethodAsm::new(ACC_PUBLIC, &mname, "()V", insns));
            methods.push((mname, false));
        }
        for j in 0..rng.gen_range(0..=2usize) {
            let mname = format!("m{i}x{j}");
            let mut insns = body(&mut rng);
            insns.push(AsmInsn::Return);
            spec = spec.method(MethodAsm::new(ACC_PUBLIC, &mname, "()V", insns));
            methods.push((mname, false));
        }
        if rng.gen_bool(0.4) {
            let mut insns = body(&mut rng);
            insns.push(AsmInsn::Iconst(0));
            insns.push(AsmInsn::Ireturn);
            spec = spec.method(MethodAsm::new(ACC_PUBLIC, "hashCode", "()I", insns));
            methods.push(("hashCode".into(), true));
        }
        if rng.gen_bool(0.2) {
            let mut insns = body(&mut rng);
            insns.push(AsmInsn::AconstNull);
            insns.push(AsmInsn::Areturn);
            spec = spec.method(MethodAsm::new(
                ACC_PUBLIC,
                "toString",
                "()Ljava/lang/String;",
                insns,
            ));
        }
        planned.push(Planned { spec, level, concrete: true, methods });
    }

    let specs: Vec<ClassAsm> = planned.into_iter().map(|p| p.spec).collect();
    artifact_of(&specs)
}
