"""Indexed binary heap and array-backed sorted doubly-linked lists.

Both structures address items by small integer handles ``0..size-1`` so the
selection workspace can reach any individual in either structure in O(1).
"""
from __future__ import annotations

from typing import Any, Sequence

NIL = -1


class IndexedHeap:
    """Min-heap over integer items with an item -> heap-slot handle array.

    ``ops`` counts queue operations (push, pop, decrease-key) and
    ``sift_steps`` counts swaps; both exclude the initial :meth:`build`.
    Increasing a key is done by lowering it to ``sentinel`` (smaller than every
    legal key), popping the item and pushing it back with the new key.
    """

    def __init__(self, capacity: int, sentinel: Any):
        self._heap: list[int] = []
        self._slot = [NIL] * capacity
        self._key: list[Any] = [None] * capacity
        self.sentinel = sentinel
        self.ops = 0
        self.sift_steps = 0

    def __len__(self) -> int:
        return len(self._heap)

    def __contains__(self, item: int) -> bool:
        return self._slot[item] != NIL

    def key(self, item: int):
        return self._key[item]

    def build(self, items: Sequence[int], keys: Sequence[Any]) -> None:
        for item, key in zip(items, keys):
            self._key[item] = key
        self._heap = list(items)
        for s, item in enumerate(self._heap):
            self._slot[item] = s
        steps = self.sift_steps
        for s in range(len(self._heap) // 2 - 1, -1, -1):
            self._sift_down(s)
        self.sift_steps = steps

    def push(self, item: int, key) -> None:
        self.ops += 1
        self._key[item] = key
        self._heap.append(item)
        self._slot[item] = len(self._heap) - 1
        self._sift_up(len(self._heap) - 1)

    def peek(self) -> tuple[int, Any]:
        item = self._heap[0]
        return item, self._key[item]

    def pop(self) -> tuple[int, Any]:
        self.ops += 1
        heap = self._heap
        top = heap[0]
        last = heap.pop()
        self._slot[top] = NIL
        if heap:
            heap[0] = last
            self._slot[last] = 0
            self._sift_down(0)
        return top, self._key[top]

    def decrease_key(self, item: int, key) -> None:
        if not key <= self._key[item]:
            raise ValueError("decrease_key with a larger key")
        self.ops += 1
        self._key[item] = key
        self._sift_up(self._slot[item])

    def update_key(self, item: int, key) -> None:
        if key <= self._key[item]:
            self.decrease_key(item, key)
            return
        self.decrease_key(item, self.sentinel)
        popped, _ = self.pop()
        assert popped == item
        self.push(item, key)

    def _sift_up(self, s: int) -> None:
        heap, key, slot = self._heap, self._key, self._slot
        item = heap[s]
        k = key[item]
        while s > 0:
            parent = (s - 1) >> 1
            p_item = heap[parent]
            if not k < key[p_item]:
                break
            heap[s] = p_item
            slot[p_item] = s
            s = parent
            self.sift_steps += 1
        heap[s] = item
        slot[item] = s

    def _sift_down(self, s: int) -> None:
        heap, key, slot = self._heap, self._key, self._slot
        size = len(heap)
        item = heap[s]
        k = key[item]
        while True:
            child = 2 * s + 1
            if child >= size:
                break
            if child + 1 < size and key[heap[child + 1]] < key[heap[child]]:
                child += 1
            c_item = heap[child]
            if not key[c_item] < k:
                break
            heap[s] = c_item
            slot[c_item] = s
            s = child
            self.sift_steps += 1
        heap[s] = item
        slot[item] = s


class SortedLinkedList:
    """Doubly-linked list over handles, built in a given order; supports unlink."""

    def __init__(self, order: Sequence[int], capacity: int):
        self.prev = [NIL] * capacity
        self.next = [NIL] * capacity
        self.head = order[0] if order else NIL
        self.tail = order[-1] if order else NIL
        self.size = len(order)
        for a, b in zip(order, order[1:]):
            self.next[a] = b
            self.prev[b] = a

    def unlink(self, i: int) -> None:
        p, q = self.prev[i], self.next[i]
        if p != NIL:
            self.next[p] = q
        else:
            self.head = q
        if q != NIL:
            self.prev[q] = p
        else:
            self.tail = p
        self.prev[i] = self.next[i] = NIL
        self.size -= 1

    def __iter__(self):
        i = self.head
        while i != NIL:
            yield i
            i = self.next[i]
