#include "hcopt/interp.hpp"

#include <set>
#include <unordered_map>

namespace hcopt {

namespace {

// ---- values ----

enum class VClass : std::uint8_t { I32, U32, I64, Ptr, Void };

VClass class_of(const CType& t)
{
    if (t.pointer_depth > 0)
        return VClass::Ptr;
    switch (t.base) {
    case BaseType::UnsignedInt: return VClass::U32;
    case BaseType::Void: return VClass::Void;
    default: return VClass::I32;
    }
}

VClass common_class(VClass a, VClass b)
{
    if (a == VClass::I64 || b == VClass::I64)
        return VClass::I64;
    if (a == VClass::U32 || b == VClass::U32)
        return VClass::U32;
    return VClass::I32;
}

std::int64_t normalize(std::int64_t v, VClass c)
{
    switch (c) {
    case VClass::I32: return static_cast<std::int32_t>(static_cast<std::uint32_t>(v));
    case VClass::U32: return static_cast<std::uint32_t>(v);
    default: return v;
    }
}

std::int64_t normalize_to(std::int64_t v, const CType& t)
{
    if (t.pointer_depth == 0 && t.base == BaseType::Char)
        return static_cast<std::int8_t>(static_cast<std::uint8_t>(v));
    return normalize(v, class_of(t));
}

// A pointer is {seg, offset}; an integer is {0, value}. Segment 0 is null.
struct Value {
    std::int64_t n = 0;
    std::uint32_t seg = 0;
};

bool truthy(const Value& v) { return v.n != 0 || v.seg != 0; }

// ---- compiled program ----

enum class Op : std::uint8_t {
    Const,
    Str,
    LocalGet,
    LocalCell,
    GlobalCell,
    LocalArray,
    GlobalArray,
    Neg,
    Not,
    BitNot,
    Bin,
    LogAnd,
    LogOr,
    PtrAdd,
    PtrSub,
    PtrDiff,
    PtrCmp,
    IndexAddr,
    Load,
    AddrOf,
    Assign,
    IncDec,
    Call,
    Builtin,
    Ternary,
    Cast,
};

enum class Builtin : std::uint8_t { Printf, Sprintf, Putchar, Fflush, Malloc, Free, Memset, Strlen, Rand, Srand, Time };

struct Node {
    Op op = Op::Const;
    VClass cls = VClass::I32;
    VClass conv = VClass::I32; // operand class for Bin / compound assignment
    BinaryOp bop = BinaryOp::Add;
    AssignOp aop = AssignOp::Assign;
    bool pre = false;
    bool inc = false;
    CType type;   // result type after array decay
    CType access; // element type touched by Load / stores; pointee for pointer arithmetic
    int a = -1, b = -1, c = -1;
    std::int64_t imm = 0;
    std::int64_t stride = 1;
    std::vector<int> args;
    std::vector<VClass> arg_classes;
    int line = 0;
};

enum class SOp : std::uint8_t { Expr, Block, If, While, DoWhile, For, Return, Decl, Nop };

enum class DeclKind : std::uint8_t { Frame, Cell, Array };

struct SNode {
    SOp op = SOp::Nop;
    int e = -1, init = -1, step = -1;
    int then_ = -1, else_ = -1, body = -1;
    std::vector<int> kids;
    bool fused = false;
    int fused_slot = -1;
    CType fused_type;
    // Decl
    DeclKind decl_kind = DeclKind::Frame;
    int slot = -1;
    CType decl_type;
    std::optional<std::string> string_init;
    int line = 0;
};

struct SegLocal {
    int slot;
    CType elem;
    std::int64_t count;
};

struct Param {
    int slot;
    CType type;
    bool cell;
};

struct FnInfo {
    std::string name;
    CType ret;
    int nslots = 0;
    std::vector<Param> params;
    std::vector<SegLocal> seg_locals;
    int body = -1;
    int line = 0;
};

struct StaticSeg {
    std::string name;
    CType elem;
    std::int64_t count = 1;
    int init = -1;                         // scalar initializer node
    std::optional<std::string> str_init;   // char array initializer or literal bytes
};

struct Program {
    std::vector<Node> nodes;
    std::vector<SourceSpan> spans;
    std::vector<SNode> stmts;
    std::vector<FnInfo> fns;
    std::vector<StaticSeg> statics; // segment ids 1..size
    int max_line = 0;
    std::string file;
};

// ---- compiler ----

struct Typed {
    Typed(int n, CType t, std::vector<std::int64_t> sub = {}, bool lv = false)
        : node(n), type(t), sub_dims(std::move(sub)), lvalue(lv)
    {
    }
    int node;
    CType type;
    std::vector<std::int64_t> sub_dims; // dims of the pointee array, for pointers from arrays
    bool lvalue;
};

enum class RefKind { Frame, Cell, FrameArray, Global, GlobalArray, Value };

struct VarRef {
    RefKind kind;
    std::int64_t where; // slot or segment id
    CType type;
    std::vector<std::int64_t> dims;
};

std::int64_t product(const std::vector<std::int64_t>& v, std::size_t from)
{
    std::int64_t p = 1;
    for (std::size_t i = from; i < v.size(); ++i)
        p *= v[i];
    return p;
}

class Compiler {
public:
    explicit Compiler(const TranslationUnit& tu) : tu_(tu) {}

    Program compile()
    {
        p_.file = tu_.file;
        for (std::size_t i = 0; i < tu_.functions.size(); ++i)
            fn_index_[tu_.functions[i].name] = static_cast<int>(i);
        p_.fns.resize(tu_.functions.size());
        scopes_.emplace_back();
        for (const auto& g : tu_.globals) {
            StaticSeg seg;
            seg.name = g.decl.name;
            seg.elem = g.decl.type;
            seg.count = g.decl.is_array() ? g.decl.element_count() : 1;
            std::int64_t id = add_static(std::move(seg));
            if (g.decl.init) {
                require_constant(*g.decl.init);
                if (g.decl.init->kind == ExprKind::StrLit && g.decl.is_array())
                    p_.statics[static_cast<std::size_t>(id - 1)].str_init = g.decl.init->name;
                else
                    p_.statics[static_cast<std::size_t>(id - 1)].init = convert(expr(*g.decl.init), g.decl.type);
            }
            scopes_.back()[g.decl.name] =
                VarRef{g.decl.is_array() ? RefKind::GlobalArray : RefKind::Global, id, g.decl.type, g.decl.dims};
        }
        for (std::size_t i = 0; i < tu_.functions.size(); ++i)
            function(static_cast<int>(i));
        return std::move(p_);
    }

private:
    const TranslationUnit& tu_;
    Program p_;
    std::unordered_map<std::string, int> fn_index_;
    std::vector<std::unordered_map<std::string, VarRef>> scopes_;
    std::set<std::string> addressed_;
    FnInfo* fn_ = nullptr;
    std::unordered_map<const Expr*, int> str_cache_;

    // Static storage is initialized before any frame exists.
    void require_constant(const Expr& init)
    {
        walk_expr(init, [&](const Expr& e) {
            bool local = false;
            if (e.kind == ExprKind::Var && !is_builtin_value(e.name)) {
                const VarRef* r = lookup(e.name);
                local = r && r->kind != RefKind::Global && r->kind != RefKind::GlobalArray;
            }
            if (local || e.kind == ExprKind::Call)
                throw Error(ErrorKind::UnsupportedConstruct, "initializer of static storage must be constant", e.span);
        });
    }

    std::int64_t add_static(StaticSeg s)
    {
        p_.statics.push_back(std::move(s));
        return static_cast<std::int64_t>(p_.statics.size());
    }

    [[noreturn]] void mismatch(const SourceSpan& span, const std::string& what)
    {
        throw Error(ErrorKind::TypeMismatch, what, span);
    }

    int add(Node n, const SourceSpan& span)
    {
        n.line = span.line_start;
        p_.max_line = std::max(p_.max_line, span.line_start);
        p_.nodes.push_back(std::move(n));
        p_.spans.push_back(span);
        return static_cast<int>(p_.nodes.size() - 1);
    }

    int add_stmt(SNode s)
    {
        p_.stmts.push_back(std::move(s));
        return static_cast<int>(p_.stmts.size() - 1);
    }

    const VarRef* lookup(const std::string& name) const
    {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto f = it->find(name);
            if (f != it->end())
                return &f->second;
        }
        return nullptr;
    }

    void function(int index)
    {
        const FunctionDef& f = tu_.functions[static_cast<std::size_t>(index)];
        FnInfo& info = p_.fns[static_cast<std::size_t>(index)];
        fn_ = &info;
        info.name = f.name;
        info.ret = f.return_type;
        info.line = f.span.line_start;
        addressed_.clear();
        walk_all_exprs(f.body, [&](const Expr& e) {
            if (e.kind == ExprKind::AddrOf && e.operand().kind == ExprKind::Var)
                addressed_.insert(e.operand().name);
        });
        scopes_.emplace_back();
        for (const auto& prm : f.params) {
            bool cell = addressed_.count(prm.name) > 0;
            int slot = info.nslots++;
            info.params.push_back(Param{slot, prm.type, cell});
            if (cell)
                info.seg_locals.push_back(SegLocal{slot, prm.type, 1});
            scopes_.back()[prm.name] = VarRef{cell ? RefKind::Cell : RefKind::Frame, slot, prm.type, {}};
        }
        // parameters and the outermost block share a scope
        SNode block;
        block.op = SOp::Block;
        block.line = f.body.span.line_start;
        for (const auto& s : f.body.body)
            block.kids.push_back(stmt(s));
        info.body = add_stmt(std::move(block));
        scopes_.pop_back();
        fn_ = nullptr;
    }

    int stmt(const Stmt& s)
    {
        SNode n;
        n.line = s.span.line_start;
        switch (s.kind) {
        case StmtKind::Expr:
            n.op = SOp::Expr;
            n.e = expr(*s.expr).node;
            break;
        case StmtKind::Block:
            n.op = SOp::Block;
            scopes_.emplace_back();
            for (const auto& c : s.body)
                n.kids.push_back(stmt(c));
            scopes_.pop_back();
            break;
        case StmtKind::If:
            n.op = SOp::If;
            n.e = expr(*s.expr).node;
            n.then_ = stmt(s.then_branch());
            if (s.else_branch())
                n.else_ = stmt(*s.else_branch());
            break;
        case StmtKind::While:
        case StmtKind::DoWhile:
            n.op = s.kind == StmtKind::While ? SOp::While : SOp::DoWhile;
            n.e = expr(*s.expr).node;
            n.body = stmt(s.loop_body());
            break;
        case StmtKind::For:
            n.op = SOp::For;
            if (s.init)
                n.init = expr(*s.init).node;
            if (s.expr)
                n.e = expr(*s.expr).node;
            if (s.step)
                n.step = expr(*s.step).node;
            n.body = stmt(s.loop_body());
            detect_fused(n);
            break;
        case StmtKind::Return:
            n.op = SOp::Return;
            if (s.expr) {
                Typed v = expr(*s.expr);
                n.e = fn_->ret.base == BaseType::Void && fn_->ret.pointer_depth == 0 ? v.node
                                                                                      : convert(v, fn_->ret);
            }
            break;
        case StmtKind::VarDecl:
            declare(*s.decl, s.span, n);
            break;
        }
        return add_stmt(std::move(n));
    }

    // `for (...; v != 0; v--)` on a frame-resident integer counts down to zero in one test.
    void detect_fused(SNode& n)
    {
        if (n.e < 0 || n.step < 0)
            return;
        const Node& c = p_.nodes[static_cast<std::size_t>(n.e)];
        if (c.op != Op::Bin || c.bop != BinaryOp::Ne)
            return;
        const Node& l = p_.nodes[static_cast<std::size_t>(c.a)];
        const Node& r = p_.nodes[static_cast<std::size_t>(c.b)];
        if (l.op != Op::LocalGet || l.cls == VClass::Ptr || r.op != Op::Const || r.imm != 0)
            return;
        const Node& st = p_.nodes[static_cast<std::size_t>(n.step)];
        if (st.op != Op::IncDec || st.inc)
            return;
        const Node& target = p_.nodes[static_cast<std::size_t>(st.a)];
        if (target.op != Op::LocalGet || target.imm != l.imm)
            return;
        n.fused = true;
        n.fused_slot = static_cast<int>(l.imm);
        n.fused_type = l.type;
    }

    void declare(const VarDecl& d, const SourceSpan& span, SNode& n)
    {
        if (d.is_static) {
            StaticSeg seg;
            seg.name = fn_->name + "." + d.name;
            seg.elem = d.type;
            seg.count = d.is_array() ? d.element_count() : 1;
            std::int64_t id = add_static(std::move(seg));
            auto& st = p_.statics[static_cast<std::size_t>(id - 1)];
            if (d.init) {
                require_constant(*d.init);
                if (d.init->kind == ExprKind::StrLit && d.is_array())
                    st.str_init = d.init->name;
                else
                    p_.statics[static_cast<std::size_t>(id - 1)].init = convert(expr(*d.init), d.type);
            }
            scopes_.back()[d.name] = VarRef{d.is_array() ? RefKind::GlobalArray : RefKind::Global, id, d.type, d.dims};
            n.op = SOp::Nop;
            return;
        }
        n.op = SOp::Decl;
        n.decl_type = d.type;
        n.slot = fn_->nslots++;
        if (d.init) {
            if (d.is_array())
                n.string_init = d.init->name;
            else
                n.init = convert(expr(*d.init), d.type);
        }
        if (d.is_array()) {
            n.decl_kind = DeclKind::Array;
            fn_->seg_locals.push_back(SegLocal{n.slot, d.type, d.element_count()});
        } else if (addressed_.count(d.name)) {
            n.decl_kind = DeclKind::Cell;
            fn_->seg_locals.push_back(SegLocal{n.slot, d.type, 1});
        } else {
            n.decl_kind = DeclKind::Frame;
        }
        (void)span;
        // the name is visible only after its own initializer
        RefKind k = n.decl_kind == DeclKind::Array  ? RefKind::FrameArray
                    : n.decl_kind == DeclKind::Cell ? RefKind::Cell
                                                    : RefKind::Frame;
        scopes_.back()[d.name] = VarRef{k, n.slot, d.type, d.dims};
    }

    // Wraps `t` so its value is converted to `to` (assignment, argument, return).
    int convert(const Typed& t, const CType& to)
    {
        VClass from = p_.nodes[static_cast<std::size_t>(t.node)].cls;
        VClass dest = class_of(to);
        if (dest == VClass::Ptr || from == VClass::Ptr) {
            if (dest != from && !(dest == VClass::Ptr && from != VClass::Void))
                mismatch(p_.spans[static_cast<std::size_t>(t.node)], "cannot convert pointer to integer implicitly");
            return t.node;
        }
        if (from == dest && !(to.pointer_depth == 0 && to.base == BaseType::Char))
            return t.node;
        Node n;
        n.op = Op::Cast;
        n.type = to;
        n.cls = dest;
        n.a = t.node;
        return add(std::move(n), p_.spans[static_cast<std::size_t>(t.node)]);
    }

    static CType promoted(VClass c)
    {
        switch (c) {
        case VClass::U32: return kUnsigned;
        case VClass::I64: return kInt; // printed type only; class carries the width
        default: return kInt;
        }
    }

    VClass cls(const Typed& t) const { return p_.nodes[static_cast<std::size_t>(t.node)].cls; }

    Typed var(const Expr& e)
    {
        if (is_builtin_value(e.name)) {
            Node n;
            n.op = Op::Const;
            n.imm = 0;
            return Typed{add(std::move(n), e.span), kInt};
        }
        const VarRef* r = lookup(e.name);
        if (!r)
            throw Error(ErrorKind::UnresolvedIdentifier, "'" + e.name + "' is not declared", e.span);
        Node n;
        n.imm = r->where;
        n.type = r->type;
        n.access = r->type;
        n.cls = class_of(r->type);
        switch (r->kind) {
        case RefKind::Frame: n.op = Op::LocalGet; break;
        case RefKind::Cell: n.op = Op::LocalCell; break;
        case RefKind::Global: n.op = Op::GlobalCell; break;
        case RefKind::FrameArray:
        case RefKind::GlobalArray: {
            n.op = r->kind == RefKind::FrameArray ? Op::LocalArray : Op::GlobalArray;
            n.type = r->type.pointer_to();
            n.cls = VClass::Ptr;
            n.access = r->type;
            std::vector<std::int64_t> sub(r->dims.begin() + 1, r->dims.end());
            n.stride = product(sub, 0);
            return Typed{add(std::move(n), e.span), r->type.pointer_to(), std::move(sub), false};
        }
        case RefKind::Value: break;
        }
        return Typed{add(std::move(n), e.span), r->type, {}, true};
    }

    Typed load_through(Typed addr, const SourceSpan& span)
    {
        const CType elem = addr.type.pointee();
        if (!addr.sub_dims.empty()) {
            // indexing a row of a multi-dimensional array yields the row itself
            std::vector<std::int64_t> sub(addr.sub_dims.begin() + 1, addr.sub_dims.end());
            return Typed{addr.node, addr.type, std::move(sub), false};
        }
        if (elem.base == BaseType::Void && elem.pointer_depth == 0)
            mismatch(span, "dereference of void pointer");
        Node n;
        n.op = Op::Load;
        n.a = addr.node;
        n.type = elem;
        n.access = elem;
        n.cls = class_of(elem);
        return Typed{add(std::move(n), span), elem, {}, true};
    }

    Typed expr(const Expr& e)
    {
        Node n;
        switch (e.kind) {
        case ExprKind::IntLit:
            n.op = Op::Const;
            n.imm = e.value;
            n.cls = e.value <= INT32_MAX ? VClass::I32 : VClass::I64;
            n.type = kInt;
            return Typed{add(std::move(n), e.span), kInt};
        case ExprKind::CharLit:
            n.op = Op::Const;
            n.imm = e.value;
            n.type = kInt;
            return Typed{add(std::move(n), e.span), kInt};
        case ExprKind::SizeofType:
            n.op = Op::Const;
            n.imm = size_of(e.type);
            n.cls = VClass::I64;
            n.type = kInt;
            return Typed{add(std::move(n), e.span), kInt};
        case ExprKind::StrLit: {
            auto it = str_cache_.find(&e);
            std::int64_t id;
            if (it != str_cache_.end()) {
                id = it->second;
            } else {
                StaticSeg seg;
                seg.name = "<string>";
                seg.elem = kChar;
                seg.count = static_cast<std::int64_t>(e.name.size()) + 1;
                seg.str_init = e.name;
                id = add_static(std::move(seg));
                str_cache_[&e] = static_cast<int>(id);
            }
            n.op = Op::Str;
            n.imm = id;
            n.cls = VClass::Ptr;
            n.type = kChar.pointer_to();
            n.access = kChar;
            return Typed{add(std::move(n), e.span), kChar.pointer_to()};
        }
        case ExprKind::Var: return var(e);
        case ExprKind::Unary: {
            Typed v = expr(e.operand());
            VClass c = cls(v);
            if (e.unary_op != UnaryOp::Not && (c == VClass::Ptr || c == VClass::Void))
                mismatch(e.span, "arithmetic on a pointer operand");
            n.op = e.unary_op == UnaryOp::Neg ? Op::Neg : e.unary_op == UnaryOp::Not ? Op::Not : Op::BitNot;
            n.a = v.node;
            n.cls = e.unary_op == UnaryOp::Not ? VClass::I32 : c;
            n.type = promoted(n.cls);
            return Typed{add(std::move(n), e.span), n.type};
        }
        case ExprKind::Binary: return binary(e);
        case ExprKind::Assign: return assign(e);
        case ExprKind::PreInc:
        case ExprKind::PreDec:
        case ExprKind::PostInc:
        case ExprKind::PostDec: {
            Typed t = expr(e.operand());
            require_lvalue(t, e.span);
            n.op = Op::IncDec;
            n.pre = e.kind == ExprKind::PreInc || e.kind == ExprKind::PreDec;
            n.inc = e.kind == ExprKind::PreInc || e.kind == ExprKind::PostInc;
            n.a = t.node;
            n.type = t.type;
            n.cls = cls(t);
            n.access = t.type.is_pointer() ? t.type.pointee() : t.type;
            n.stride = t.type.is_pointer() ? product(t.sub_dims, 0) : 1;
            return Typed{add(std::move(n), e.span), t.type, t.sub_dims};
        }
        case ExprKind::Index: {
            Typed base = expr(e.lhs());
            Typed idx = expr(e.rhs());
            if (cls(base) != VClass::Ptr)
                std::swap(base, idx);
            if (cls(base) != VClass::Ptr || cls(idx) == VClass::Ptr)
                mismatch(e.span, "subscript needs one pointer and one integer");
            n.op = Op::IndexAddr;
            n.a = base.node;
            n.b = idx.node;
            n.type = base.type;
            n.cls = VClass::Ptr;
            n.access = base.type.pointee();
            n.stride = product(base.sub_dims, 0);
            Typed addr{add(std::move(n), e.span), base.type, base.sub_dims};
            return load_through(std::move(addr), e.span);
        }
        case ExprKind::Deref: {
            Typed p = expr(e.operand());
            if (cls(p) != VClass::Ptr)
                mismatch(e.span, "dereference of a non-pointer");
            return load_through(std::move(p), e.span);
        }
        case ExprKind::AddrOf: {
            Typed t = expr(e.operand());
            require_lvalue(t, e.span);
            Node& target = p_.nodes[static_cast<std::size_t>(t.node)];
            if (target.op == Op::LocalGet)
                mismatch(e.span, "address of a register-resident local");
            if (target.op == Op::Load) {
                // &*p and &a[i] are the address computation itself
                int addr = target.a;
                return Typed{addr, t.type.pointer_to(), {}};
            }
            n.op = Op::AddrOf;
            n.a = t.node;
            n.type = t.type.pointer_to();
            n.cls = VClass::Ptr;
            n.access = t.type;
            return Typed{add(std::move(n), e.span), n.type};
        }
        case ExprKind::Call: return call(e);
        case ExprKind::Ternary: {
            Typed c = expr(e.args[0]);
            Typed t = expr(e.args[1]);
            Typed f = expr(e.args[2]);
            VClass tc = cls(t), fc = cls(f);
            n.op = Op::Ternary;
            n.a = c.node;
            n.b = t.node;
            n.c = f.node;
            if (tc == VClass::Ptr || fc == VClass::Ptr) {
                n.cls = VClass::Ptr;
                n.type = tc == VClass::Ptr ? t.type : f.type;
            } else if (tc == VClass::Void || fc == VClass::Void) {
                n.cls = VClass::Void;
                n.type = kVoid;
            } else {
                n.cls = common_class(tc, fc);
                n.type = promoted(n.cls);
            }
            return Typed{add(std::move(n), e.span), n.type};
        }
        case ExprKind::Cast: {
            Typed v = expr(e.operand());
            n.op = Op::Cast;
            n.a = v.node;
            n.type = e.type;
            n.cls = class_of(e.type);
            return Typed{add(std::move(n), e.span), e.type};
        }
        }
        mismatch(e.span, "unsupported expression");
    }

    void require_lvalue(const Typed& t, const SourceSpan& span)
    {
        if (!t.lvalue)
            mismatch(span, "expression is not assignable");
    }

    Typed binary(const Expr& e)
    {
        Typed l = expr(e.lhs());
        Typed r = expr(e.rhs());
        VClass lc = cls(l), rc = cls(r);
        if (lc == VClass::Void || rc == VClass::Void)
            mismatch(e.span, "void value used in an expression");
        Node n;
        n.a = l.node;
        n.b = r.node;
        n.bop = e.binary_op;
        const bool lp = lc == VClass::Ptr, rp = rc == VClass::Ptr;
        if (e.binary_op == BinaryOp::LogAnd || e.binary_op == BinaryOp::LogOr) {
            n.op = e.binary_op == BinaryOp::LogAnd ? Op::LogAnd : Op::LogOr;
            n.type = kInt;
            return Typed{add(std::move(n), e.span), kInt};
        }
        if (is_comparison(e.binary_op)) {
            n.op = lp || rp ? Op::PtrCmp : Op::Bin;
            n.conv = common_class(lc, rc);
            n.type = kInt;
            return Typed{add(std::move(n), e.span), kInt};
        }
        if (lp || rp) {
            if (e.binary_op == BinaryOp::Add && lp != rp) {
                Typed& ptr = lp ? l : r;
                n.op = Op::PtrAdd;
                n.a = ptr.node;
                n.b = lp ? r.node : l.node;
                n.type = ptr.type;
                n.cls = VClass::Ptr;
                n.access = ptr.type.pointee();
                n.stride = product(ptr.sub_dims, 0);
                auto sub = ptr.sub_dims;
                return Typed{add(std::move(n), e.span), ptr.type, std::move(sub)};
            }
            if (e.binary_op == BinaryOp::Sub && lp && !rp) {
                n.op = Op::PtrSub;
                n.type = l.type;
                n.cls = VClass::Ptr;
                n.access = l.type.pointee();
                n.stride = product(l.sub_dims, 0);
                auto sub = l.sub_dims;
                return Typed{add(std::move(n), e.span), l.type, std::move(sub)};
            }
            if (e.binary_op == BinaryOp::Sub && lp && rp) {
                n.op = Op::PtrDiff;
                n.cls = VClass::I64;
                n.stride = product(l.sub_dims, 0);
                n.type = kInt;
                return Typed{add(std::move(n), e.span), kInt};
            }
            mismatch(e.span, "invalid pointer arithmetic");
        }
        n.op = Op::Bin;
        if (e.binary_op == BinaryOp::Shl || e.binary_op == BinaryOp::Shr)
            n.conv = lc;
        else
            n.conv = common_class(lc, rc);
        n.cls = n.conv;
        n.type = promoted(n.cls);
        return Typed{add(std::move(n), e.span), n.type};
    }

    Typed assign(const Expr& e)
    {
        Typed t = expr(e.lhs());
        require_lvalue(t, e.span);
        Typed v = expr(e.rhs());
        Node n;
        n.op = Op::Assign;
        n.aop = e.assign_op;
        n.a = t.node;
        n.type = t.type;
        n.cls = cls(t);
        n.access = t.type;
        VClass tc = cls(t), vc = cls(v);
        if (e.assign_op == AssignOp::Assign) {
            n.b = convert(v, t.type);
        } else if (tc == VClass::Ptr) {
            if (vc == VClass::Ptr || (e.assign_op != AssignOp::Add && e.assign_op != AssignOp::Sub))
                mismatch(e.span, "invalid compound assignment on a pointer");
            n.b = v.node;
            n.stride = product(t.sub_dims, 0);
        } else {
            if (vc == VClass::Ptr || vc == VClass::Void)
                mismatch(e.span, "invalid compound assignment operand");
            n.b = v.node;
            n.conv = common_class(tc, vc);
        }
        return Typed{add(std::move(n), e.span), t.type, t.sub_dims};
    }

    Typed call(const Expr& e)
    {
        Node n;
        auto fi = fn_index_.find(e.name);
        if (fi != fn_index_.end()) {
            const FunctionDef& f = tu_.functions[static_cast<std::size_t>(fi->second)];
            if (f.params.size() != e.args.size())
                mismatch(e.span, "'" + e.name + "' expects " + std::to_string(f.params.size()) + " arguments");
            for (std::size_t i = 0; i < e.args.size(); ++i)
                n.args.push_back(convert(expr(e.args[i]), f.params[i].type));
            n.op = Op::Call;
            n.imm = fi->second;
            n.type = f.return_type;
            n.cls = class_of(f.return_type);
            return Typed{add(std::move(n), e.span), f.return_type};
        }
        static const std::unordered_map<std::string, Builtin> builtins = {
            {"printf", Builtin::Printf}, {"sprintf", Builtin::Sprintf}, {"putchar", Builtin::Putchar},
            {"fflush", Builtin::Fflush}, {"malloc", Builtin::Malloc},   {"free", Builtin::Free},
            {"memset", Builtin::Memset}, {"strlen", Builtin::Strlen},   {"rand", Builtin::Rand},
            {"srand", Builtin::Srand},   {"time", Builtin::Time},
        };
        auto bi = builtins.find(e.name);
        if (bi == builtins.end())
            throw Error(ErrorKind::UnresolvedIdentifier, "'" + e.name + "' is not a function", e.span);
        for (const auto& a : e.args) {
            Typed t = expr(a);
            n.args.push_back(t.node);
            n.arg_classes.push_back(cls(t));
        }
        n.op = Op::Builtin;
        n.imm = static_cast<std::int64_t>(bi->second);
        n.type = builtin_return_type(e.name);
        n.cls = class_of(n.type);
        if (bi->second == Builtin::Strlen)
            n.cls = VClass::U32;
        return Typed{add(std::move(n), e.span), n.type};
    }
};

// ---- machine ----

struct Segment {
    std::vector<Value> cells;
    CType elem;
    bool untyped = false; // raw malloc bytes, typed on first access
    bool alive = true;
    bool heap = false;
    std::string name;
};

struct Location {
    bool frame = false;
    std::size_t slot = 0;
    Value ptr;
};

enum class Flow { Normal, Returned };

class Machine {
public:
    Machine(const Program& p, const RunConfig& cfg) : p_(p), cfg_(cfg), rng_(static_cast<std::uint32_t>(cfg.seed))
    {
        weights_ = cfg.cost_model.weights;
        fn_cost_.assign(p.fns.size(), 0);
        line_cost_.assign(static_cast<std::size_t>(p.max_line) + 1, 0);
        segs_.emplace_back(); // null
        segs_[0].alive = false;
        segs_[0].name = "<null>";
        for (const auto& s : p.statics) {
            Segment seg;
            seg.elem = s.elem;
            seg.name = s.name;
            seg.cells.assign(static_cast<std::size_t>(s.count), Value{});
            segs_.push_back(std::move(seg));
        }
        for (std::size_t i = 0; i < p.statics.size(); ++i) {
            const auto& s = p.statics[i];
            Segment& seg = segs_[i + 1];
            if (s.str_init) {
                for (std::size_t k = 0; k < s.str_init->size() && k < seg.cells.size(); ++k)
                    seg.cells[k].n = static_cast<std::int8_t>((*s.str_init)[k]);
            } else if (s.init >= 0) {
                Value v = eval(s.init);
                segs_[i + 1].cells[0] = store_form(v, s.elem);
            }
        }
    }

    ExecResult execute(int entry)
    {
        const FnInfo& f = p_.fns[static_cast<std::size_t>(entry)];
        std::vector<Value> args;
        for (std::size_t i = 0; i < f.params.size(); ++i) {
            const CType& t = f.params[i].type;
            if (i == 0 && f.params.size() == 2 && t.is_integer() &&
                f.params[1].type == CType{BaseType::Char, 2, false}) {
                args.push_back(Value{static_cast<std::int64_t>(cfg_.argv.size() + 1), 0});
            } else if (i == 1 && t == CType{BaseType::Char, 2, false}) {
                args.push_back(build_argv());
            } else {
                args.push_back(Value{});
            }
        }
        if (cfg_.trace)
            trace_ = "event\tfunction\tdepth\tcost\n";
        Value rv = call(entry, args);
        ExecResult r;
        r.stdout_bytes = std::move(out_);
        r.exit_code = static_cast<int>(rv.n);
        r.steps = steps_;
        r.trace = std::move(trace_);
        r.cost.counts = counts_;
        r.cost.total = total_;
        for (std::size_t i = 0; i < fn_cost_.size(); ++i)
            if (fn_cost_[i])
                r.cost.per_function[p_.fns[i].name] += fn_cost_[i];
        for (std::size_t l = 0; l < line_cost_.size(); ++l)
            if (line_cost_[l])
                r.cost.per_location[p_.file + ":" + std::to_string(l)] += line_cost_[l];
        return r;
    }

private:
    const Program& p_;
    const RunConfig& cfg_;
    Lcg rng_;
    std::vector<Segment> segs_;
    std::vector<Value> stack_;
    std::size_t fp_ = 0;
    int cur_fn_ = -1;
    int depth_ = 0;
    std::uint64_t steps_ = 0;
    std::string out_;
    std::string trace_;
    Value ret_;
    std::array<std::uint64_t, kCostCategories> weights_{};
    std::array<std::uint64_t, kCostCategories> counts_{};
    std::vector<std::uint64_t> fn_cost_;
    std::vector<std::uint64_t> line_cost_;
    std::uint64_t total_ = 0;

    void charge(CostCategory c, int line)
    {
        if (cur_fn_ < 0)
            return;
        const auto i = static_cast<std::size_t>(c);
        const std::uint64_t w = weights_[i];
        ++counts_[i];
        total_ += w;
        fn_cost_[static_cast<std::size_t>(cur_fn_)] += w;
        line_cost_[static_cast<std::size_t>(line)] += w;
    }

    const SourceSpan& span(int node) const { return p_.spans[static_cast<std::size_t>(node)]; }
    const Node& node(int i) const { return p_.nodes[static_cast<std::size_t>(i)]; }

    std::uint32_t new_segment(const CType& elem, std::int64_t count, std::string name)
    {
        Segment s;
        s.elem = elem;
        s.cells.assign(static_cast<std::size_t>(count), Value{});
        s.name = std::move(name);
        segs_.push_back(std::move(s));
        return static_cast<std::uint32_t>(segs_.size() - 1);
    }

    Value build_argv()
    {
        std::vector<std::string> all{p_.file.empty() ? std::string("prog") : p_.file};
        all.insert(all.end(), cfg_.argv.begin(), cfg_.argv.end());
        std::uint32_t arr = new_segment(CType{BaseType::Char, 1, false}, static_cast<std::int64_t>(all.size()) + 1,
                                        "argv");
        for (std::size_t i = 0; i < all.size(); ++i) {
            std::uint32_t s = new_segment(kChar, static_cast<std::int64_t>(all[i].size()) + 1, "argv[]");
            for (std::size_t k = 0; k < all[i].size(); ++k)
                segs_[s].cells[k].n = static_cast<std::int8_t>(all[i][k]);
            segs_[arr].cells[i] = Value{0, s};
        }
        return Value{0, arr};
    }

    static Value store_form(Value v, const CType& t)
    {
        if (t.is_pointer())
            return v;
        return Value{normalize_to(v.n, t), 0};
    }

    // Checks a typed access through `p` and returns the segment.
    Segment& access(const Value& p, const CType& t, int at, std::int64_t extent = 1)
    {
        if (p.seg == 0)
            throw Error(ErrorKind::NullDeref, "null pointer dereference", span(at));
        Segment& s = segs_[p.seg];
        if (!s.alive)
            throw Error(ErrorKind::UseAfterFree, "access to '" + s.name + "' after its lifetime ended", span(at));
        if (s.untyped)
            adopt(s, t);
        else if (size_of(s.elem) != size_of(t) || s.elem.is_pointer() != t.is_pointer())
            throw Error(ErrorKind::TypeMismatch,
                        "'" + s.name + "' holds " + to_string(s.elem) + " but is accessed as " + to_string(t),
                        span(at));
        if (p.n < 0 || p.n + extent > static_cast<std::int64_t>(s.cells.size()))
            throw Error(ErrorKind::OutOfBounds,
                        "offset " + std::to_string(p.n) + " outside '" + s.name + "' of " +
                            std::to_string(s.cells.size()) + " elements",
                        span(at));
        return s;
    }

    // Raw bytes become elements of `t`, little-endian.
    static void adopt(Segment& s, const CType& t)
    {
        const int width = std::max(size_of(t), 1);
        std::vector<Value> cells(s.cells.size() / static_cast<std::size_t>(width));
        for (std::size_t i = 0; i < cells.size(); ++i) {
            std::uint64_t v = 0;
            for (int b = width - 1; b >= 0; --b)
                v = (v << 8) | (static_cast<std::uint64_t>(s.cells[i * static_cast<std::size_t>(width) +
                                                                   static_cast<std::size_t>(b)]
                                                               .n) &
                                0xFF);
            cells[i] = t.is_pointer() ? Value{} : Value{normalize_to(static_cast<std::int64_t>(v), t), 0};
        }
        s.cells = std::move(cells);
        s.elem = t.unqualified();
        s.untyped = false;
    }

    Value read(const Value& p, const CType& t, int at)
    {
        Segment& s = access(p, t, at);
        const Value& v = s.cells[static_cast<std::size_t>(p.n)];
        return t.is_pointer() ? v : Value{normalize_to(v.n, t), 0};
    }

    void write(const Value& p, const CType& t, const Value& v, int at)
    {
        Segment& s = access(p, t, at);
        s.cells[static_cast<std::size_t>(p.n)] = store_form(v, t);
    }

    Value& frame(std::int64_t slot) { return stack_[fp_ + static_cast<std::size_t>(slot)]; }

    // Resolves an lvalue node without loading it. Charges the cost of the address computation only.
    Location locate(int ni)
    {
        const Node& n = node(ni);
        switch (n.op) {
        case Op::LocalGet: return Location{true, fp_ + static_cast<std::size_t>(n.imm), {}};
        case Op::LocalCell: return Location{false, 0, Value{0, static_cast<std::uint32_t>(frame(n.imm).n)}};
        case Op::GlobalCell: return Location{false, 0, Value{0, static_cast<std::uint32_t>(n.imm)}};
        case Op::Load: return Location{false, 0, eval(n.a)};
        default: throw Error(ErrorKind::TypeMismatch, "expression is not assignable", span(ni));
        }
    }

    bool memory_lvalue(int ni) const { return node(ni).op != Op::LocalGet && node(ni).op != Op::LocalCell; }

    Value load_loc(const Location& loc, const CType& t, int at)
    {
        if (loc.frame)
            return stack_[loc.slot];
        return read(loc.ptr, t, at);
    }

    void store_loc(const Location& loc, const CType& t, const Value& v, int at)
    {
        if (loc.frame)
            stack_[loc.slot] = store_form(v, t);
        else
            write(loc.ptr, t, v, at);
    }

    static std::int64_t convert_value(std::int64_t v, VClass to) { return normalize(v, to); }

    std::int64_t arith(BinaryOp op, std::int64_t a, std::int64_t b, VClass c, int at)
    {
        const auto ua = static_cast<std::uint64_t>(a), ub = static_cast<std::uint64_t>(b);
        switch (op) {
        case BinaryOp::Add: return normalize(static_cast<std::int64_t>(ua + ub), c);
        case BinaryOp::Sub: return normalize(static_cast<std::int64_t>(ua - ub), c);
        case BinaryOp::Mul: return normalize(static_cast<std::int64_t>(ua * ub), c);
        case BinaryOp::Div:
        case BinaryOp::Mod: {
            if (b == 0)
                throw Error(ErrorKind::DivisionByZero, "division by zero", span(at));
            if (c == VClass::U32) {
                auto x = static_cast<std::uint32_t>(a), y = static_cast<std::uint32_t>(b);
                return op == BinaryOp::Div ? x / y : x % y;
            }
            if (a == INT64_MIN && b == -1)
                return op == BinaryOp::Div ? INT64_MIN : 0;
            return normalize(op == BinaryOp::Div ? a / b : a % b, c);
        }
        case BinaryOp::BitAnd: return normalize(a & b, c);
        case BinaryOp::BitOr: return normalize(a | b, c);
        case BinaryOp::Shl: return normalize(static_cast<std::int64_t>(ua << (ub & 63)), c);
        case BinaryOp::Shr:
            if (c == VClass::U32)
                return static_cast<std::uint32_t>(a) >> (ub & 63);
            return normalize(a >> (ub & 63), c);
        case BinaryOp::Lt: return a < b;
        case BinaryOp::Le: return a <= b;
        case BinaryOp::Gt: return a > b;
        case BinaryOp::Ge: return a >= b;
        case BinaryOp::Eq: return a == b;
        case BinaryOp::Ne: return a != b;
        default: return 0;
        }
    }

    static CostCategory category(BinaryOp op)
    {
        switch (op) {
        case BinaryOp::Add:
        case BinaryOp::Sub:
        case BinaryOp::Mul: return CostCategory::Arith;
        case BinaryOp::Div:
        case BinaryOp::Mod: return CostCategory::DivMod;
        case BinaryOp::BitAnd:
        case BinaryOp::BitOr:
        case BinaryOp::Shl:
        case BinaryOp::Shr: return CostCategory::Bitwise;
        case BinaryOp::LogAnd:
        case BinaryOp::LogOr: return CostCategory::LogicalBranching;
        default: return CostCategory::Compare;
        }
    }

    static CostCategory category(AssignOp op)
    {
        return op == AssignOp::Div ? CostCategory::DivMod : CostCategory::Arith;
    }

    static BinaryOp binary_of(AssignOp op)
    {
        switch (op) {
        case AssignOp::Add: return BinaryOp::Add;
        case AssignOp::Sub: return BinaryOp::Sub;
        case AssignOp::Mul: return BinaryOp::Mul;
        default: return BinaryOp::Div;
        }
    }

    Value eval(int ni)
    {
        const Node& n = node(ni);
        switch (n.op) {
        case Op::Const: return Value{n.imm, 0};
        case Op::Str: return Value{0, static_cast<std::uint32_t>(n.imm)};
        case Op::LocalGet: return frame(n.imm);
        case Op::LocalCell: return read(Value{0, static_cast<std::uint32_t>(frame(n.imm).n)}, n.access, ni);
        case Op::GlobalCell:
            charge(CostCategory::Load, n.line);
            return read(Value{0, static_cast<std::uint32_t>(n.imm)}, n.access, ni);
        case Op::LocalArray: return Value{0, static_cast<std::uint32_t>(frame(n.imm).n)};
        case Op::GlobalArray:
            charge(CostCategory::Load, n.line);
            return Value{0, static_cast<std::uint32_t>(n.imm)};
        case Op::Neg: {
            Value v = eval(n.a);
            charge(CostCategory::Arith, n.line);
            return Value{normalize(static_cast<std::int64_t>(0 - static_cast<std::uint64_t>(v.n)), n.cls), 0};
        }
        case Op::BitNot: {
            Value v = eval(n.a);
            charge(CostCategory::Bitwise, n.line);
            return Value{normalize(~v.n, n.cls), 0};
        }
        case Op::Not: {
            Value v = eval(n.a);
            charge(CostCategory::Compare, n.line);
            return Value{truthy(v) ? 0 : 1, 0};
        }
        case Op::Bin: {
            Value a = eval(n.a);
            Value b = eval(n.b);
            charge(category(n.bop), n.line);
            const VClass c = n.conv;
            const bool shift = n.bop == BinaryOp::Shl || n.bop == BinaryOp::Shr;
            return Value{arith(n.bop, convert_value(a.n, c), shift ? b.n : convert_value(b.n, c), c, ni), 0};
        }
        case Op::LogAnd: {
            charge(CostCategory::LogicalBranching, n.line);
            if (!truthy(eval(n.a)))
                return Value{0, 0};
            return Value{truthy(eval(n.b)) ? 1 : 0, 0};
        }
        case Op::LogOr: {
            charge(CostCategory::LogicalBranching, n.line);
            if (truthy(eval(n.a)))
                return Value{1, 0};
            return Value{truthy(eval(n.b)) ? 1 : 0, 0};
        }
        case Op::PtrAdd:
        case Op::PtrSub:
        case Op::IndexAddr: {
            Value p = eval(n.a);
            Value k = eval(n.b);
            // subscripts fold into the addressing mode
            if (n.op != Op::IndexAddr)
                charge(CostCategory::Arith, n.line);
            std::int64_t d = k.n * n.stride;
            if (p.seg && segs_[p.seg].untyped && segs_[p.seg].alive)
                adopt(segs_[p.seg], n.access);
            return Value{n.op == Op::PtrSub ? p.n - d : p.n + d, p.seg};
        }
        case Op::PtrDiff: {
            Value a = eval(n.a);
            Value b = eval(n.b);
            charge(CostCategory::Arith, n.line);
            if (a.seg != b.seg)
                throw Error(ErrorKind::TypeMismatch, "difference of pointers into different objects", span(ni));
            return Value{(a.n - b.n) / n.stride, 0};
        }
        case Op::PtrCmp: {
            Value a = eval(n.a);
            Value b = eval(n.b);
            charge(CostCategory::Compare, n.line);
            auto ka = std::pair(a.seg, a.n), kb = std::pair(b.seg, b.n);
            bool r = false;
            switch (n.bop) {
            case BinaryOp::Lt: r = ka < kb; break;
            case BinaryOp::Le: r = ka <= kb; break;
            case BinaryOp::Gt: r = ka > kb; break;
            case BinaryOp::Ge: r = ka >= kb; break;
            case BinaryOp::Eq: r = ka == kb; break;
            default: r = ka != kb; break;
            }
            return Value{r ? 1 : 0, 0};
        }
        case Op::Load: {
            Value p = eval(n.a);
            charge(CostCategory::Load, n.line);
            return read(p, n.access, ni);
        }
        case Op::AddrOf: {
            const Node& t = node(n.a);
            if (t.op == Op::LocalCell)
                return Value{0, static_cast<std::uint32_t>(frame(t.imm).n)};
            if (t.op == Op::GlobalCell)
                return Value{0, static_cast<std::uint32_t>(t.imm)};
            throw Error(ErrorKind::TypeMismatch, "cannot take this address", span(ni));
        }
        case Op::Assign: return assign(n, ni);
        case Op::IncDec: {
            Location loc = locate(n.a);
            const bool mem = memory_lvalue(n.a) && node(n.a).op != Op::LocalCell;
            if (mem)
                charge(CostCategory::Load, n.line);
            Value old = load_loc(loc, n.type, ni);
            charge(CostCategory::Arith, n.line);
            Value now = old;
            const std::int64_t delta = n.inc ? 1 : -1;
            if (n.cls == VClass::Ptr)
                now.n += delta * n.stride;
            else
                now.n = normalize_to(static_cast<std::int64_t>(static_cast<std::uint64_t>(old.n) +
                                                               static_cast<std::uint64_t>(delta)),
                                     n.type);
            if (mem)
                charge(CostCategory::Store, n.line);
            store_loc(loc, n.type, now, ni);
            return n.pre ? now : old;
        }
        case Op::Call: {
            std::vector<Value> args;
            args.reserve(n.args.size());
            for (int a : n.args)
                args.push_back(eval(a));
            return call(static_cast<int>(n.imm), args);
        }
        case Op::Builtin: return builtin(n, ni);
        case Op::Ternary:
            charge(CostCategory::Branch, n.line);
            if (truthy(eval(n.a))) {
                Value v = eval(n.b);
                return n.cls == VClass::Ptr ? v : Value{normalize(v.n, n.cls), 0};
            } else {
                Value v = eval(n.c);
                return n.cls == VClass::Ptr ? v : Value{normalize(v.n, n.cls), 0};
            }
        case Op::Cast: {
            Value v = eval(n.a);
            if (n.cls == VClass::Ptr)
                return v;
            if (n.cls == VClass::Void)
                return Value{};
            if (v.seg != 0)
                throw Error(ErrorKind::TypeMismatch, "pointer converted to an integer", span(ni));
            return Value{normalize_to(v.n, n.type), 0};
        }
        }
        return Value{};
    }

    Value assign(const Node& n, int ni)
    {
        const bool mem = memory_lvalue(n.a) && node(n.a).op != Op::LocalCell;
        if (n.aop == AssignOp::Assign) {
            Value v = eval(n.b);
            Location loc = locate(n.a);
            if (mem)
                charge(CostCategory::Store, n.line);
            store_loc(loc, n.type, v, ni);
            return store_form(v, n.type);
        }
        Location loc = locate(n.a);
        if (mem)
            charge(CostCategory::Load, n.line);
        Value old = load_loc(loc, n.type, ni);
        Value rhs = eval(n.b);
        charge(category(n.aop), n.line);
        Value now;
        if (n.cls == VClass::Ptr) {
            now = old;
            now.n += (n.aop == AssignOp::Add ? rhs.n : -rhs.n) * n.stride;
        } else {
            now.n = arith(binary_of(n.aop), convert_value(old.n, n.conv), convert_value(rhs.n, n.conv), n.conv, ni);
        }
        if (mem)
            charge(CostCategory::Store, n.line);
        store_loc(loc, n.type, now, ni);
        return store_form(now, n.type);
    }

    void trace(const char* event, int fn)
    {
        if (!cfg_.trace)
            return;
        trace_ += std::string(event) + "\t" + p_.fns[static_cast<std::size_t>(fn)].name + "\t" +
                  std::to_string(depth_) + "\t" + std::to_string(total_) + "\n";
    }

    Value call(int fi, const std::vector<Value>& args)
    {
        const FnInfo& f = p_.fns[static_cast<std::size_t>(fi)];
        if (depth_ >= cfg_.max_call_depth)
            throw Error(ErrorKind::CallDepthExceeded,
                        "call depth exceeds " + std::to_string(cfg_.max_call_depth) + " in '" + f.name + "'");
        const std::size_t saved_fp = fp_;
        const int saved_fn = cur_fn_;
        const std::size_t base = stack_.size();
        stack_.resize(base + static_cast<std::size_t>(f.nslots));
        fp_ = base;
        cur_fn_ = fi;
        ++depth_;
        charge(CostCategory::CallOverhead, f.line);
        trace("enter", fi);
        std::vector<std::uint32_t> owned;
        for (const auto& sl : f.seg_locals) {
            std::uint32_t s = new_segment(sl.elem, sl.count, f.name + " local");
            owned.push_back(s);
            frame(sl.slot) = Value{static_cast<std::int64_t>(s), 0};
        }
        for (std::size_t i = 0; i < f.params.size(); ++i) {
            const Param& prm = f.params[i];
            if (prm.cell)
                segs_[static_cast<std::size_t>(frame(prm.slot).n)].cells[0] = store_form(args[i], prm.type);
            else
                frame(prm.slot) = store_form(args[i], prm.type);
        }
        Value result{};
        if (exec(f.body) == Flow::Returned)
            result = ret_;
        if (!(f.ret.base == BaseType::Void && f.ret.pointer_depth == 0))
            result = store_form(result, f.ret);
        else
            result = Value{};
        for (std::uint32_t s : owned) {
            segs_[s].alive = false;
            segs_[s].cells.clear();
            segs_[s].cells.shrink_to_fit();
        }
        trace("exit", fi);
        --depth_;
        stack_.resize(base);
        fp_ = saved_fp;
        cur_fn_ = saved_fn;
        return result;
    }

    void step(int line)
    {
        (void)line;
        if (++steps_ > cfg_.step_limit)
            throw Error(ErrorKind::StepLimitExceeded,
                        "step limit of " + std::to_string(cfg_.step_limit) + " statements exceeded");
    }

    Flow exec(int si)
    {
        const SNode& s = p_.stmts[static_cast<std::size_t>(si)];
        step(s.line);
        switch (s.op) {
        case SOp::Nop: return Flow::Normal;
        case SOp::Expr: eval(s.e); return Flow::Normal;
        case SOp::Block:
            for (int k : s.kids)
                if (exec(k) == Flow::Returned)
                    return Flow::Returned;
            return Flow::Normal;
        case SOp::If: {
            bool c = truthy(eval(s.e));
            charge(CostCategory::Branch, s.line);
            if (c)
                return exec(s.then_);
            if (s.else_ >= 0)
                return exec(s.else_);
            return Flow::Normal;
        }
        case SOp::While:
            for (;;) {
                bool c = truthy(eval(s.e));
                charge(CostCategory::Branch, s.line);
                if (!c)
                    return Flow::Normal;
                if (exec(s.body) == Flow::Returned)
                    return Flow::Returned;
                charge(CostCategory::LoopBackEdge, s.line);
            }
        case SOp::DoWhile:
            for (;;) {
                if (exec(s.body) == Flow::Returned)
                    return Flow::Returned;
                bool c = truthy(eval(s.e));
                charge(CostCategory::Branch, s.line);
                if (!c)
                    return Flow::Normal;
                charge(CostCategory::LoopBackEdge, s.line);
            }
        case SOp::For:
            if (s.init >= 0)
                eval(s.init);
            if (s.fused) {
                charge(CostCategory::Branch, s.line);
                for (;;) {
                    if (frame(s.fused_slot).n == 0)
                        return Flow::Normal;
                    if (exec(s.body) == Flow::Returned)
                        return Flow::Returned;
                    Value& v = frame(s.fused_slot);
                    v.n = normalize_to(static_cast<std::int64_t>(static_cast<std::uint64_t>(v.n) - 1), s.fused_type);
                    charge(CostCategory::LoopBackEdge, s.line);
                }
            }
            for (;;) {
                if (s.e >= 0) {
                    bool c = truthy(eval(s.e));
                    charge(CostCategory::Branch, s.line);
                    if (!c)
                        return Flow::Normal;
                }
                if (exec(s.body) == Flow::Returned)
                    return Flow::Returned;
                if (s.step >= 0)
                    eval(s.step);
                charge(CostCategory::LoopBackEdge, s.line);
            }
        case SOp::Return:
            ret_ = s.e >= 0 ? eval(s.e) : Value{};
            return Flow::Returned;
        case SOp::Decl: {
            if (s.decl_kind == DeclKind::Frame) {
                frame(s.slot) = s.init >= 0 ? store_form(eval(s.init), s.decl_type) : Value{};
                return Flow::Normal;
            }
            Segment& seg = segs_[static_cast<std::size_t>(frame(s.slot).n)];
            if (s.decl_kind == DeclKind::Cell) {
                Value v = s.init >= 0 ? store_form(eval(s.init), s.decl_type) : Value{};
                segs_[static_cast<std::size_t>(frame(s.slot).n)].cells[0] = v;
                return Flow::Normal;
            }
            std::fill(seg.cells.begin(), seg.cells.end(), Value{});
            if (s.string_init)
                for (std::size_t k = 0; k < s.string_init->size() && k < seg.cells.size(); ++k)
                    seg.cells[k].n = static_cast<std::int8_t>((*s.string_init)[k]);
            return Flow::Normal;
        }
        }
        return Flow::Normal;
    }

    // ---- builtins ----

    std::string c_string(const Value& p, int at)
    {
        Segment& s = access(p, kChar, at);
        std::string out;
        for (std::size_t i = static_cast<std::size_t>(p.n); i < s.cells.size(); ++i) {
            if (s.cells[i].n == 0)
                return out;
            out += static_cast<char>(s.cells[i].n);
        }
        throw Error(ErrorKind::OutOfBounds, "string in '" + s.name + "' is not terminated", span(at));
    }

    std::string format(const std::string& fmt, const Node& n, const std::vector<Value>& args, std::size_t first,
                       int at)
    {
        std::string out;
        std::size_t next = first;
        auto take = [&]() -> std::pair<Value, VClass> {
            if (next >= args.size())
                throw Error(ErrorKind::BadFormat, "format '" + fmt + "' needs more arguments", span(at));
            auto r = std::pair(args[next], n.arg_classes[next]);
            ++next;
            return r;
        };
        for (std::size_t i = 0; i < fmt.size(); ++i) {
            if (fmt[i] != '%') {
                out += fmt[i];
                continue;
            }
            ++i;
            bool zero = false, left = false;
            while (i < fmt.size() && (fmt[i] == '0' || fmt[i] == '-')) {
                zero |= fmt[i] == '0';
                left |= fmt[i] == '-';
                ++i;
            }
            std::size_t width = 0;
            while (i < fmt.size() && fmt[i] >= '0' && fmt[i] <= '9')
                width = width * 10 + static_cast<std::size_t>(fmt[i++] - '0');
            if (i >= fmt.size())
                throw Error(ErrorKind::BadFormat, "format '" + fmt + "' ends inside a conversion", span(at));
            std::string field;
            bool numeric = false;
            switch (fmt[i]) {
            case '%': out += '%'; continue;
            case 'd': {
                auto [v, c] = take();
                if (c == VClass::Ptr || v.seg)
                    throw Error(ErrorKind::BadFormat, "%d given a pointer", span(at));
                field = std::to_string(c == VClass::I64 ? v.n : static_cast<std::int32_t>(v.n));
                numeric = true;
                break;
            }
            case 'u': {
                auto [v, c] = take();
                if (c == VClass::Ptr || v.seg)
                    throw Error(ErrorKind::BadFormat, "%u given a pointer", span(at));
                field = std::to_string(c == VClass::I64 ? static_cast<std::uint64_t>(v.n)
                                                        : static_cast<std::uint32_t>(v.n));
                numeric = true;
                break;
            }
            case 'c': {
                auto [v, c] = take();
                if (c == VClass::Ptr)
                    throw Error(ErrorKind::BadFormat, "%c given a pointer", span(at));
                field = std::string(1, static_cast<char>(v.n));
                break;
            }
            case 's': {
                auto [v, c] = take();
                if (c != VClass::Ptr)
                    throw Error(ErrorKind::BadFormat, "%s given an integer", span(at));
                field = c_string(v, at);
                break;
            }
            default:
                throw Error(ErrorKind::BadFormat, std::string("unsupported conversion %") + fmt[i], span(at));
            }
            if (field.size() < width) {
                std::size_t pad = width - field.size();
                if (left)
                    field += std::string(pad, ' ');
                else if (zero && numeric) {
                    std::size_t sign = !field.empty() && field[0] == '-' ? 1 : 0;
                    field.insert(sign, std::string(pad, '0'));
                } else
                    field.insert(0, std::string(pad, ' '));
            }
            out += field;
        }
        if (next != args.size())
            throw Error(ErrorKind::BadFormat, "format '" + fmt + "' has unused arguments", span(at));
        return out;
    }

    void arity(const Node& n, std::size_t want, const char* name, int at)
    {
        if (n.args.size() != want)
            throw Error(ErrorKind::TypeMismatch,
                        std::string(name) + " expects " + std::to_string(want) + " argument(s)", span(at));
    }

    Value builtin(const Node& n, int ni)
    {
        std::vector<Value> args;
        args.reserve(n.args.size());
        for (int a : n.args)
            args.push_back(eval(a));
        charge(CostCategory::BuiltinCall, n.line);
        switch (static_cast<Builtin>(n.imm)) {
        case Builtin::Printf: {
            if (args.empty() || n.arg_classes[0] != VClass::Ptr)
                throw Error(ErrorKind::BadFormat, "printf needs a format string", span(ni));
            std::string s = format(c_string(args[0], ni), n, args, 1, ni);
            out_ += s;
            return Value{static_cast<std::int64_t>(s.size()), 0};
        }
        case Builtin::Sprintf: {
            if (args.size() < 2 || n.arg_classes[0] != VClass::Ptr || n.arg_classes[1] != VClass::Ptr)
                throw Error(ErrorKind::BadFormat, "sprintf needs a buffer and a format string", span(ni));
            std::string s = format(c_string(args[1], ni), n, args, 2, ni);
            Segment& seg = access(args[0], kChar, ni, static_cast<std::int64_t>(s.size()) + 1);
            for (std::size_t k = 0; k <= s.size(); ++k)
                seg.cells[static_cast<std::size_t>(args[0].n) + k].n =
                    k < s.size() ? static_cast<std::int8_t>(s[k]) : 0;
            return Value{static_cast<std::int64_t>(s.size()), 0};
        }
        case Builtin::Putchar:
            arity(n, 1, "putchar", ni);
            out_ += static_cast<char>(args[0].n);
            return Value{args[0].n & 0xFF, 0};
        case Builtin::Fflush: return Value{};
        case Builtin::Malloc: {
            arity(n, 1, "malloc", ni);
            if (args[0].seg || args[0].n < 0)
                throw Error(ErrorKind::InvalidArgument, "malloc size must be a non-negative integer", span(ni));
            std::uint32_t s = new_segment(kChar, args[0].n, "malloc@" + std::to_string(n.line));
            segs_[s].untyped = true;
            segs_[s].heap = true;
            return Value{0, s};
        }
        case Builtin::Free: {
            arity(n, 1, "free", ni);
            const Value& p = args[0];
            if (p.seg == 0 && p.n == 0)
                return Value{};
            if (p.seg == 0 || !segs_[p.seg].heap || !segs_[p.seg].alive || p.n != 0)
                throw Error(ErrorKind::InvalidFree, "free of a pointer not returned by malloc", span(ni));
            segs_[p.seg].alive = false;
            segs_[p.seg].cells.clear();
            segs_[p.seg].cells.shrink_to_fit();
            return Value{};
        }
        case Builtin::Memset: return memset(n, args, ni);
        case Builtin::Strlen:
            arity(n, 1, "strlen", ni);
            return Value{static_cast<std::int64_t>(c_string(args[0], ni).size()), 0};
        case Builtin::Rand: return Value{rng_.next(), 0};
        case Builtin::Srand:
            arity(n, 1, "srand", ni);
            rng_.seed(static_cast<std::uint32_t>(args[0].n));
            return Value{};
        case Builtin::Time: {
            std::int64_t t = cfg_.time_value.value_or(cfg_.seed);
            if (!args.empty() && args[0].seg != 0)
                write(args[0], kInt, Value{t, 0}, ni);
            return Value{normalize(t, VClass::I32), 0};
        }
        }
        return Value{};
    }

    // Fills whole elements with the byte splat; a trailing partial element gets its low bytes replaced.
    Value memset(const Node& n, const std::vector<Value>& args, int ni)
    {
        arity(n, 3, "memset", ni);
        const Value& p = args[0];
        const std::uint8_t byte = static_cast<std::uint8_t>(args[1].n);
        const std::int64_t bytes = args[2].n;
        if (bytes < 0 || args[2].seg)
            throw Error(ErrorKind::InvalidArgument, "memset length must be non-negative", span(ni));
        if (p.seg == 0)
            throw Error(ErrorKind::NullDeref, "memset on a null pointer", span(ni));
        Segment& probe = segs_[p.seg];
        if (!probe.alive)
            throw Error(ErrorKind::UseAfterFree, "memset on '" + probe.name + "' after its lifetime ended", span(ni));
        const CType elem = probe.untyped ? kChar : probe.elem;
        const std::int64_t width = std::max(size_of(elem), 1);
        const std::int64_t whole = bytes / width, rem = bytes % width;
        if (bytes == 0)
            return p;
        Segment& s = access(p, elem, ni, whole + (rem ? 1 : 0));
        if (elem.is_pointer() && (byte != 0 || rem))
            throw Error(ErrorKind::TypeMismatch, "memset of pointer elements must clear whole elements", span(ni));
        std::uint64_t splat = 0;
        for (std::int64_t b = 0; b < width; ++b)
            splat = (splat << 8) | byte;
        for (std::int64_t k = 0; k < whole; ++k)
            s.cells[static_cast<std::size_t>(p.n + k)] =
                elem.is_pointer() ? Value{} : Value{normalize_to(static_cast<std::int64_t>(splat), elem), 0};
        if (rem) {
            Value& cell = s.cells[static_cast<std::size_t>(p.n + whole)];
            const std::uint64_t mask = (std::uint64_t{1} << (8 * rem)) - 1;
            const std::uint64_t v = (static_cast<std::uint64_t>(cell.n) & ~mask) | (splat & mask);
            cell.n = normalize_to(static_cast<std::int64_t>(v), elem);
        }
        return p;
    }
};

} // namespace

ExecResult run(const TranslationUnit& tu, std::string_view entry, const RunConfig& config)
{
    const FunctionDef* f = tu.find_function(entry);
    if (!f)
        throw Error(ErrorKind::UnknownEntry, "no function named '" + std::string(entry) + "'");
    Program program = Compiler(tu).compile();
    int index = static_cast<int>(f - tu.functions.data());
    Machine m(program, config);
    return m.execute(index);
}

} // namespace hcopt
