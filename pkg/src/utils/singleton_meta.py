import threading
from typing import Any, Dict


class SingletonMeta(type):
    """Thread-safe singleton metaclass with an explicit reset hook.

    Every class using this metaclass keeps at most one live instance. Creation
    goes through double-checked locking so concurrent workers that race on the
    first access still observe the same object. ``reset()`` drops the instance,
    which lets the CLI re-initialize runtime settings between commands and lets
    tests start from a clean state.

    Attributes:
        _instances (Dict[type, Any]): Live instance per class.
        _lock (threading.Lock): Guards instance creation and reset.
    """

    _instances: Dict[type, Any] = {}
    _lock = threading.Lock()

    def __call__(cls, *args: Any, **kwargs: Any) -> Any:
        instance = SingletonMeta._instances.get(cls)
        if instance is None:
            with SingletonMeta._lock:
                instance = SingletonMeta._instances.get(cls)
                if instance is None:
                    instance = super().__call__(*args, **kwargs)
                    SingletonMeta._instances[cls] = instance
        return instance

    def instance(cls) -> Any:
        """Returns the live instance or None when the class was never created."""
        return SingletonMeta._instances.get(cls)

    def reset(cls) -> None:
        """Forgets the live instance so the next call constructs a new one."""
        with SingletonMeta._lock:
            SingletonMeta._instances.pop(cls, None)
