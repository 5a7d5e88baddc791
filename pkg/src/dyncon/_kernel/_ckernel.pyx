# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel: same surface as ``_pykernel``.

Every routine here runs while holding the interpreter lock and calls no
Python-level code, so each call is indivisible with respect to other Python
threads. Compare-and-swap cells rely on exactly that property.
"""

from ._pykernel import make_connected  # noqa: F401  (shared, test-only)

BACKEND = "cython"


def set_write_hook(fn):
    if fn is not None:
        raise NotImplementedError("write hooks need the pure-Python kernel")


# -- lock-free bag -----------------------------------------------------------

cdef class _BagNode:
    cdef public object value
    cdef public _BagNode next
    cdef public bint marked

    def __cinit__(self, object value, _BagNode nxt):
        self.value = value
        self.next = nxt
        self.marked = False


cdef class ConcurrentMultiset:
    """Unordered lock-free bag: head insertion, mark-then-unlink removal."""

    cdef _BagNode _head

    def __cinit__(self):
        self._head = _BagNode(None, None)

    cpdef add(self, object value):
        cdef _BagNode head = self._head
        # Allocate first: allocation may run the cyclic collector.
        cdef _BagNode node = _BagNode(value, None)
        node.next = head.next
        head.next = node

    cpdef bint remove_one(self, object value):
        cdef _BagNode pred = self._head
        cdef _BagNode node = pred.next
        while node is not None:
            if not node.marked and node.value == value:
                node.marked = True
                if pred.next is node:
                    pred.next = node.next
                return True
            if node.marked:
                if pred.next is node:
                    pred.next = node.next
            else:
                pred = node
            node = node.next
        return False

    cpdef bint nonempty(self):
        cdef _BagNode node = self._head.next
        while node is not None:
            if not node.marked:
                return True
            node = node.next
        return False

    def __iter__(self):
        cdef _BagNode node = self._head.next
        while node is not None:
            if not node.marked:
                yield node.value
            node = node.next

    def __len__(self):
        cdef Py_ssize_t k = 0
        cdef _BagNode node = self._head.next
        while node is not None:
            if not node.marked:
                k += 1
            node = node.next
        return k

    def count(self, value):
        cdef Py_ssize_t k = 0
        cdef _BagNode node = self._head.next
        while node is not None:
            if not node.marked and node.value == value:
                k += 1
            node = node.next
        return k


# -- nodes -------------------------------------------------------------------

cdef class Node:
    """Cartesian-tree node; vertex nodes always outrank arc nodes."""

    cdef public Node parent
    cdef public Node left
    cdef public Node right
    cdef public unsigned long long priority
    cdef public unsigned long long nid
    cdef public long vertex
    cdef public object arc
    cdef public unsigned long long version
    cdef public long cnt
    cdef public long size
    cdef public bint nsp
    cdef public bint sp
    cdef public bint span_here
    cdef public ConcurrentMultiset edges
    cdef public object removal_op
    cdef public object lock

    def __cinit__(self, unsigned long long priority, unsigned long long nid,
                  long vertex=-1, object arc=None):
        self.priority = priority
        self.nid = nid
        self.vertex = vertex
        self.arc = arc
        self.version = 0
        self.cnt = 1
        self.size = 1 if vertex >= 0 else 0

    @property
    def key(self):
        return ((1 if self.vertex >= 0 else 0) << 128) | (self.priority << 64) | self.nid

    def __repr__(self):
        if self.vertex >= 0:
            return f"Node(v={self.vertex}, nid={self.nid})"
        return f"Node(arc={self.arc}, nid={self.nid})"


cdef inline bint _higher(Node a, Node b):
    cdef bint va = a.vertex >= 0
    cdef bint vb = b.vertex >= 0
    if va != vb:
        return va
    if a.priority != b.priority:
        return a.priority > b.priority
    return a.nid > b.nid


def higher(Node a, Node b):
    return _higher(a, b)


# -- readers -----------------------------------------------------------------

def find_root(Node x):
    while x.parent is not None:
        x = x.parent
    return x, x.version


cpdef Node root_of(Node x):
    while x.parent is not None:
        x = x.parent
    return x


def connected(Node a, Node b):
    cdef Node ur, vr, r
    cdef unsigned long long uv, vv
    cdef long attempts = 0
    if a is b:
        return True, 1
    while True:
        attempts += 1
        ur = root_of(a)
        uv = ur.version
        vr = root_of(b)
        vv = vr.version
        r = root_of(a)
        if r is not ur or r.version != uv:
            continue
        if ur is not vr:
            r = root_of(b)
            if r is not vr or r.version != vv:
                continue
            r = root_of(a)
            if r is not ur or r.version != uv:
                continue
        return ur is vr, attempts


cpdef Node piece_root(Node x):
    cdef Node p
    while True:
        p = x.parent
        if p is None or (p.left is not x and p.right is not x):
            return x
        x = p


# -- writer side -------------------------------------------------------------

cdef inline bint _should_flag(Node x):
    if x.edges is not None and x.edges.nonempty():
        return True
    if x.left is not None and x.left.nsp:
        return True
    return x.right is not None and x.right.nsp


cpdef recalculate_flags(Node x):
    cdef bint flag = _should_flag(x)
    x.nsp = flag
    if not flag and _should_flag(x):
        x.nsp = True


cpdef set_flags_up(Node x):
    while x is not None:
        if x.nsp:
            return
        x.nsp = True
        x = x.parent


cdef inline void _pull(Node x):
    cdef Node l = x.left
    cdef Node r = x.right
    cdef long c = 1
    cdef long s = 1 if x.vertex >= 0 else 0
    cdef bint sp = x.span_here
    if l is not None:
        c += l.cnt
        s += l.size
        sp = sp or l.sp
    if r is not None:
        c += r.cnt
        s += r.size
        sp = sp or r.sp
    x.cnt = c
    x.size = s
    x.sp = sp
    recalculate_flags(x)


def pull(Node x):
    _pull(x)


def pull_up(Node x):
    cdef Node p
    while True:
        _pull(x)
        p = x.parent
        if p is None or (p.left is not x and p.right is not x):
            return
        x = p


cdef tuple _split_up(Node cur, Node left, Node right, Node anchor):
    cdef Node p
    while True:
        p = cur.parent
        if p is None or (p.left is not cur and p.right is not cur):
            break
        if p.left is cur:
            p.left = right
            if right is not None:
                right.parent = p
            _pull(p)
            right = p
        else:
            p.right = left
            if left is not None:
                left.parent = p
            _pull(p)
            left = p
        cur = p
    if left is not None and left is not anchor:
        left.parent = anchor
    if right is not None and right is not anchor:
        right.parent = anchor
    return left, right


def split_before(Node x, Node anchor):
    cdef Node left = x.left
    x.left = None
    _pull(x)
    return _split_up(x, left, x, anchor)


def split_after(Node x, Node anchor):
    cdef Node right = x.right
    x.right = None
    _pull(x)
    return _split_up(x, x, right, anchor)


def join(Node a, Node b, Node anchor):
    cdef Node root, parent, nxt, tail
    cdef bint right_side, down_right
    cdef list path
    cdef Py_ssize_t i
    if a is None:
        return b
    if b is None:
        return a
    if _higher(a, b):
        root = parent = a
        a = a.right
        right_side = True
    else:
        root = parent = b
        b = b.left
        right_side = False
    path = [parent]
    while a is not None and b is not None:
        if _higher(a, b):
            nxt = a
            a = a.right
            down_right = True
        else:
            nxt = b
            b = b.left
            down_right = False
        if right_side:
            parent.right = nxt
        else:
            parent.left = nxt
        nxt.parent = parent
        parent = nxt
        right_side = down_right
        path.append(nxt)
    tail = a if a is not None else b
    if right_side:
        parent.right = tail
    else:
        parent.left = tail
    if tail is not None:
        tail.parent = parent
    for i in range(len(path) - 1, -1, -1):
        _pull(<Node>path[i])
    if root is not anchor:
        root.parent = anchor
    return root


def position(Node x):
    cdef long pos = x.left.cnt if x.left is not None else 0
    cdef Node p
    while True:
        p = x.parent
        if p is None or (p.left is not x and p.right is not x):
            return pos
        if p.right is x:
            pos += 1 + (p.left.cnt if p.left is not None else 0)
        x = p


def select_vertex(Node root, long k):
    cdef Node x = root
    cdef long ls
    while True:
        ls = x.left.size if x.left is not None else 0
        if k < ls:
            x = x.left
            continue
        k -= ls
        if x.vertex >= 0:
            if k == 0:
                return x
            k -= 1
        x = x.right


def inorder(Node root):
    cdef list stack = []
    cdef Node x = root
    while stack or x is not None:
        while x is not None:
            stack.append(x)
            x = x.left
        x = stack.pop()
        yield x
        x = x.right


# -- atomic cells ------------------------------------------------------------

cdef class AtomicRef:
    """Reference cell with identity compare-and-swap."""

    cdef public object value

    def __cinit__(self, value=None):
        self.value = value

    cpdef object get(self):
        return self.value

    cpdef set(self, object value):
        self.value = value

    cpdef bint cas(self, object expected, object new):
        if self.value is expected:
            self.value = new
            return True
        return False


cdef class StateMap:
    """Concurrent ``edge -> state`` map with identity compare-and-swap."""

    cdef dict _d
    cdef public object recorder

    def __cinit__(self):
        self._d = {}
        self.recorder = None

    cpdef object get(self, object edge):
        return self._d.get(edge)

    def __len__(self):
        return len(self._d)

    def items(self):
        return list(self._d.items())

    cpdef object put_if_absent(self, object edge, object state):
        cdef object cur = self._d.setdefault(edge, state)
        if cur is not state:
            return cur
        if self.recorder is not None:
            self.recorder(edge, None, state)
        return None

    cpdef bint cas(self, object edge, object expected, object new):
        cdef object cur = self._d.get(edge)
        if cur is None or cur is not expected:
            return False
        if new is None:
            del self._d[edge]
        else:
            self._d[edge] = new
        if self.recorder is not None:
            self.recorder(edge, expected, new)
        return True
